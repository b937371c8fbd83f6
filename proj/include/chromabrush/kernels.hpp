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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops. Every kernel has a portable scalar reference
// and optional SIMD variants; one table is chosen at first use from the CPU
// features (override with CHROMABRUSH_KERNELS=scalar|avx2|neon) and can be
// switched explicitly with select().
//
// Within one backend all reductions run in a fixed order, so results are
// bit-reproducible. Across backends results agree to rounding only (the SIMD
// variants use fused multiply-add and lane-wise partial sums).
namespace chromabrush::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // C(m x n) += A(m x k) * B(k x n); all row-major and densely packed.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c);
};

bool supported(Backend backend) noexcept;
// Throws ConfigError if the backend is not compiled in or the CPU lacks it.
const KernelTable& table(Backend backend);
const KernelTable& active();
void select(Backend backend);
std::string_view backend_name(Backend backend) noexcept;
std::vector<Backend> available_backends();

// Restores the previously active backend on scope exit.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend backend);
  ~ScopedBackend();
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}
inline void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 const double* b, double* c) {
  active().gemm(m, n, k, a, b, c);
}

}  // namespace chromabrush::kernels
