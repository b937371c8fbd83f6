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

#include "kernels_internal.hpp"

#if defined(__aarch64__)
#define CHROMABRUSH_HAVE_NEON_TU 1
#include <arm_neon.h>

#include <cmath>
#endif

namespace chromabrush::kernels::detail {

#if defined(CHROMABRUSH_HAVE_NEON_TU)
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double total = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) total = std::fma(a[i], b[i], total);
  return total;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

void gemm_neon(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
               double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c_row = c + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      float64x2_t acc0 = vld1q_f64(c_row + j);
      float64x2_t acc1 = vld1q_f64(c_row + j + 2);
      for (std::size_t t = 0; t < k; ++t) {
        const float64x2_t av = vdupq_n_f64(a[i * k + t]);
        acc0 = vfmaq_f64(acc0, av, vld1q_f64(b + t * n + j));
        acc1 = vfmaq_f64(acc1, av, vld1q_f64(b + t * n + j + 2));
      }
      vst1q_f64(c_row + j, acc0);
      vst1q_f64(c_row + j + 2, acc1);
    }
    for (; j < n; ++j) {
      double acc = c_row[j];
      for (std::size_t t = 0; t < k; ++t) acc = std::fma(a[i * k + t], b[t * n + j], acc);
      c_row[j] = acc;
    }
  }
}

constexpr KernelTable kNeonTable{Backend::kNeon, "neon", dot_neon, axpy_neon, sum_squares_neon,
                                 gemm_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeonTable; }
#else
const KernelTable* neon_table() noexcept { return nullptr; }
#endif

}  // namespace chromabrush::kernels::detail
