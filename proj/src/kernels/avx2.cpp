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

#if defined(__x86_64__) || defined(_M_X64)
#define CHROMABRUSH_HAVE_AVX2_TU 1
#include <immintrin.h>

#include <cmath>
#endif

namespace chromabrush::kernels::detail {

#if defined(CHROMABRUSH_HAVE_AVX2_TU)
namespace {

// Horizontal sum in a fixed lane order: ((l0 + l1) + (l2 + l3)).
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const double l0 = _mm_cvtsd_f64(lo);
  const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  const double l2 = _mm_cvtsd_f64(hi);
  const double l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
  return (l0 + l1) + (l2 + l3);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  double total = hsum(acc);
  for (; i < n; ++i) total = std::fma(a[i], b[i], total);
  return total;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

// 4x8 register tile: eight accumulators held across the whole k loop, so
// every C[i][j] still sums over t in increasing order (one fma per t).
inline void tile_4x8(std::size_t n, std::size_t k, const double* a, const double* b,
                     double* c) {
  __m256d c00 = _mm256_loadu_pd(c + 0 * n), c01 = _mm256_loadu_pd(c + 0 * n + 4);
  __m256d c10 = _mm256_loadu_pd(c + 1 * n), c11 = _mm256_loadu_pd(c + 1 * n + 4);
  __m256d c20 = _mm256_loadu_pd(c + 2 * n), c21 = _mm256_loadu_pd(c + 2 * n + 4);
  __m256d c30 = _mm256_loadu_pd(c + 3 * n), c31 = _mm256_loadu_pd(c + 3 * n + 4);
  for (std::size_t t = 0; t < k; ++t) {
    const __m256d b0 = _mm256_loadu_pd(b + t * n);
    const __m256d b1 = _mm256_loadu_pd(b + t * n + 4);
    __m256d av = _mm256_broadcast_sd(a + 0 * k + t);
    c00 = _mm256_fmadd_pd(av, b0, c00);
    c01 = _mm256_fmadd_pd(av, b1, c01);
    av = _mm256_broadcast_sd(a + 1 * k + t);
    c10 = _mm256_fmadd_pd(av, b0, c10);
    c11 = _mm256_fmadd_pd(av, b1, c11);
    av = _mm256_broadcast_sd(a + 2 * k + t);
    c20 = _mm256_fmadd_pd(av, b0, c20);
    c21 = _mm256_fmadd_pd(av, b1, c21);
    av = _mm256_broadcast_sd(a + 3 * k + t);
    c30 = _mm256_fmadd_pd(av, b0, c30);
    c31 = _mm256_fmadd_pd(av, b1, c31);
  }
  _mm256_storeu_pd(c + 0 * n, c00);
  _mm256_storeu_pd(c + 0 * n + 4, c01);
  _mm256_storeu_pd(c + 1 * n, c10);
  _mm256_storeu_pd(c + 1 * n + 4, c11);
  _mm256_storeu_pd(c + 2 * n, c20);
  _mm256_storeu_pd(c + 2 * n + 4, c21);
  _mm256_storeu_pd(c + 3 * n, c30);
  _mm256_storeu_pd(c + 3 * n + 4, c31);
}

// Single row, columns [j0, n): 4-wide vector then scalar fma tail.
inline void row_strip(std::size_t j0, std::size_t n, std::size_t k, const double* a_row,
                      const double* b, double* c_row) {
  std::size_t j = j0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(c_row + j);
    for (std::size_t t = 0; t < k; ++t) {
      acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a_row + t), _mm256_loadu_pd(b + t * n + j), acc);
    }
    _mm256_storeu_pd(c_row + j, acc);
  }
  for (; j < n; ++j) {
    double acc = c_row[j];
    for (std::size_t t = 0; t < k; ++t) acc = std::fma(a_row[t], b[t * n + j], acc);
    c_row[j] = acc;
  }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
               double* c) {
  const std::size_t n8 = n - n % 8;
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    for (std::size_t j = 0; j < n8; j += 8) tile_4x8(n, k, a + i * k, b + j, c + i * n + j);
    if (n8 < n) {
      for (std::size_t r = 0; r < 4; ++r) row_strip(n8, n, k, a + (i + r) * k, b, c + (i + r) * n);
    }
  }
  for (; i < m; ++i) row_strip(0, n, k, a + i * k, b, c + i * n);
}

constexpr KernelTable kAvx2Table{Backend::kAvx2, "avx2", dot_avx2, axpy_avx2, sum_squares_avx2,
                                 gemm_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2Table; }
#else
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

}  // namespace chromabrush::kernels::detail
