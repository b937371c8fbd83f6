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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitRuntimeFailure = 2;

inline constexpr std::size_t kProgressEvery = 25;
inline constexpr const char* kWeightsEnv = "CHROMABRUSH_WEIGHTS";

enum class Subcommand { kColorize, kCompare, kCheckWeights };

// Bad or missing flags. `usage()` holds the help text for the subcommand.
class UsageError : public Error {
 public:
  UsageError(const std::string& what, std::string usage) : Error(what), usage_(std::move(usage)) {}
  const std::string& usage() const noexcept { return usage_; }

 private:
  std::string usage_;
};

struct CliInvocation {
  Subcommand subcommand = Subcommand::kColorize;
  RunConfig config;
  std::optional<std::filesystem::path> weights_path;
  bool dry_run = false;
  int verbosity = 1;  // 0 quiet, 1 header + progress, 2 adds per-run detail
};

// argv excludes the program name. Throws UsageError; `--help` is reported as
// a UsageError whose message is empty.
CliInvocation parse_args(const std::vector<std::string>& argv);

// Run header: every RunConfig field plus the layer selection, one per line.
std::string run_header(const CliInvocation& invocation, const LayerSelection& layers);

struct WeightReportRow {
  std::string name;
  Shape weight_shape;
  Shape bias_shape;
  std::uint32_t crc32 = 0;  // zlib CRC-32 of the f32 LE bytes, weights then bias
};

// Validates a VGGW file against the VGG-19 trunk. Load errors propagate.
std::vector<WeightReportRow> check_weights(const std::filesystem::path& path);
std::string format_weight_report(const std::vector<WeightReportRow>& rows);

int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

// parse_args + run with exit-code mapping; what main() calls.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace chromabrush::cli
