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
#include "chromabrush/tensor.hpp"
#include "oracles.hpp"

namespace chromabrush {
namespace {

TEST(TensorNew, FillsEveryElement) {
  EXPECT_EQ(tensor_new({2, 2}, 0.0).values(), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(tensor_new({3}, 1.5).values(), (std::vector<double>{1.5, 1.5, 1.5}));
}

TEST(TensorNew, RejectsDegenerateShapes) {
  EXPECT_THROW(tensor_new({2, 0}, 0.0), InvalidShapeError);
  EXPECT_THROW(tensor_new({}, 0.0), InvalidShapeError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Matmul, IdentityIsExact) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(a, identity(2)), a);
}

TEST(Matmul, MatchesTripleLoopOracle) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(a, transpose(a)), Tensor::from_rows({{5, 11}, {11, 25}}));

  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 3u, 7u, 13u}) {
    for (std::size_t k : {1u, 5u, 17u}) {
      for (std::size_t m : {1u, 4u, 9u, 31u}) {
        oracle::Mat oa(n, k), ob(k, m);
        oa.v = oracle::random_vec(rng, n * k);
        ob.v = oracle::random_vec(rng, k * m);
        const Tensor c = matmul(Tensor({n, k}, oa.v), Tensor({k, m}, ob.v));
        const oracle::Mat expect = oracle::matmul(oa, ob);
        for (std::size_t i = 0; i < expect.v.size(); ++i) {
          EXPECT_NEAR(c[i], expect.v[i], 1e-12 * (1.0 + std::abs(expect.v[i])));
        }
      }
    }
  }
}

TEST(Matmul, RejectsInnerMismatch) {
  EXPECT_THROW(matmul(Tensor({2, 3}), Tensor({2, 2})), ShapeError);
  EXPECT_THROW(matmul(Tensor({4}), Tensor({4, 1})), ShapeError);
}

TEST(Axpy, Examples) {
  const Tensor x({2}, std::vector<double>{1, 2});
  const Tensor y({2}, std::vector<double>{3, 4});
  EXPECT_EQ(axpy(0.0, x, y), y);
  EXPECT_EQ(axpy(1.0, x, y).values(), (std::vector<double>{4, 6}));
  const Tensor five({2}, 5.0);
  EXPECT_EQ(axpy(-1.0, five, five).values(), (std::vector<double>{0, 0}));
  EXPECT_THROW(axpy(1.0, Tensor({2}), Tensor({3})), ShapeError);
}

TEST(SumSquares, Examples) {
  EXPECT_EQ(sum_squares(Tensor({3}, 0.0)), 0.0);
  EXPECT_EQ(sum_squares(Tensor({3}, std::vector<double>{1, -2, 2})), 9.0);
  EXPECT_EQ(sum_squares(Tensor::from_rows({{3, 4}})), 25.0);
}

TEST(TensorProperties, ScalingAndAxpyInverse) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const Tensor x({n}, oracle::random_vec(rng, n));
    const Tensor y({n}, oracle::random_vec(rng, n));
    const double c = oracle::random_vec(rng, 1, -5, 5)[0];
    const double scaled = sum_squares(axpy(c, x, Tensor({n}, 0.0)));
    EXPECT_LE(oracle::rel_err(scaled, c * c * sum_squares(x)), 1e-12);

    const Tensor back = axpy(c, x, axpy(-c, x, y));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], y[i], 1e-12 * (1 + std::abs(c)));
    EXPECT_TRUE(back.all_finite());
  }
}

TEST(Tensor, ReshapeKeepsData) {
  const Tensor a({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  const Tensor b = a.reshaped({3, 2});
  EXPECT_EQ(b.shape(), (Shape{3, 2}));
  EXPECT_EQ(b.values(), a.values());
  EXPECT_THROW(a.reshaped({4, 2}), ShapeError);
}

}  // namespace
}  // namespace chromabrush
