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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chromabrush/error.hpp"
#include "chromabrush/kernels.hpp"
#include "oracles.hpp"

namespace chromabrush::kernels {
namespace {

class KernelEquivalence : public ::testing::TestWithParam<Backend> {};

TEST_P(KernelEquivalence, DotAxpySumSquaresAgreeWithScalar) {
  const KernelTable& ref = table(Backend::kScalar);
  const KernelTable& simd = table(GetParam());
  std::mt19937_64 rng(5);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 129u, 1000u}) {
    const oracle::Vec a = oracle::random_vec(rng, n), b = oracle::random_vec(rng, n);
    const double tol = 1e-13 * (1.0 + static_cast<double>(n));
    EXPECT_NEAR(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), tol) << n;
    EXPECT_NEAR(simd.sum_squares(a.data(), n), ref.sum_squares(a.data(), n), tol) << n;

    oracle::Vec y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    simd.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);
  }
}

TEST_P(KernelEquivalence, GemmAgreesWithScalarOnRaggedShapes) {
  const KernelTable& ref = table(Backend::kScalar);
  const KernelTable& simd = table(GetParam());
  std::mt19937_64 rng(9);
  for (std::size_t m : {1u, 3u, 4u, 5u, 9u}) {
    for (std::size_t n : {1u, 7u, 8u, 9u, 17u, 33u}) {
      for (std::size_t k : {1u, 2u, 27u}) {
        const oracle::Vec a = oracle::random_vec(rng, m * k), b = oracle::random_vec(rng, k * n);
        oracle::Vec c1 = oracle::random_vec(rng, m * n), c2 = c1;
        ref.gemm(m, n, k, a.data(), b.data(), c1.data());
        simd.gemm(m, n, k, a.data(), b.data(), c2.data());
        for (std::size_t i = 0; i < m * n; ++i) {
          EXPECT_NEAR(c1[i], c2[i], 1e-13 * static_cast<double>(k + 1)) << m << "x" << n << "x" << k;
        }
      }
    }
  }
}

std::vector<Backend> backends() { return available_backends(); }

INSTANTIATE_TEST_SUITE_P(AllBackends, KernelEquivalence, ::testing::ValuesIn(backends()),
                         [](const auto& info) { return std::string(backend_name(info.param)); });

TEST(KernelDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(supported(Backend::kScalar));
  EXPECT_EQ(table(Backend::kScalar).backend, Backend::kScalar);
}

TEST(KernelDispatch, ScopedBackendRestores) {
  const Backend before = active().backend;
  {
    ScopedBackend scoped(Backend::kScalar);
    EXPECT_EQ(active().backend, Backend::kScalar);
  }
  EXPECT_EQ(active().backend, before);
}

TEST(KernelDispatch, UnsupportedBackendThrows) {
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (!supported(b)) {
      EXPECT_THROW(table(b), ConfigError);
    }
  }
}

TEST(ScalarKernels, MatchPlainLoops) {
  const KernelTable& ref = table(Backend::kScalar);
  const oracle::Vec a{1, -2, 2}, b{3, 4, 5};
  EXPECT_EQ(ref.sum_squares(a.data(), 3), 9.0);
  EXPECT_EQ(ref.dot(a.data(), b.data(), 3), 5.0);
}

}  // namespace
}  // namespace chromabrush::kernels
