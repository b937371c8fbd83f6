// Copyright 2026 The Chromabrush Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace chromabrush {

// Root of every error the engine throws. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A shape was requested with a zero extent (or no extents at all).
class InvalidShapeError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

// Weight file does not start with the expected magic/version, or its
// framing is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Weight file and network topology disagree (missing, extra or misshapen
// layers).
class TopologyError : public Error {
 public:
  using Error::Error;
};

// Weight file ended before the declared payload.
class TruncationError : public FormatError {
 public:
  TruncationError(const std::string& what, std::size_t offset)
      : FormatError(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Weight payload contains NaN or infinity.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// A layer name requested for capture (or gradient injection) is unknown.
class CaptureError : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration: mismatched key sets, out-of-range knobs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input image could not be read or decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Image is below the minimum usable size.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation precondition (e.g. non-descent direction).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Line search could not find any decrease within its evaluation budget.
class LineSearchError : public Error {
 public:
  using Error::Error;
};

// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chromabrush
