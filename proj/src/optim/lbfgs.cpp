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

#include <cmath>

#include "chromabrush/kernels.hpp"
#include "chromabrush/optim.hpp"

namespace chromabrush::optim {

LbfgsState::LbfgsState(std::size_t history_size) : capacity_(history_size == 0 ? 1 : history_size) {}

bool LbfgsState::push(Vector s, Vector y) {
  const double sy = kernels::dot(s, y);
  const double s_norm = std::sqrt(kernels::sum_squares(s));
  const double y_norm = std::sqrt(kernels::sum_squares(y));
  if (!(sy > 1e-10 * s_norm * y_norm)) return false;
  if (s_.size() == capacity_) {
    s_.pop_front();
    y_.pop_front();
    rho_.pop_front();
  }
  s_.push_back(std::move(s));
  y_.push_back(std::move(y));
  rho_.push_back(1.0 / sy);
  return true;
}

void LbfgsState::clear() {
  s_.clear();
  y_.clear();
  rho_.clear();
}

Vector lbfgs_direction(const LbfgsState& state, std::span<const double> grad) {
  const std::size_t k = state.s_.size();
  Vector q(grad.begin(), grad.end());
  std::vector<double> alpha(k);
  for (std::size_t i = k; i-- > 0;) {
    alpha[i] = state.rho_[i] * kernels::dot(state.s_[i], q);
    kernels::axpy(-alpha[i], state.y_[i], q);
  }
  double gamma = 1.0;
  if (k > 0) {
    const Vector& s = state.s_.back();
    const Vector& y = state.y_.back();
    gamma = kernels::dot(s, y) / kernels::dot(y, y);
  }
  for (double& v : q) v *= gamma;
  for (std::size_t i = 0; i < k; ++i) {
    const double beta = state.rho_[i] * kernels::dot(state.y_[i], q);
    kernels::axpy(alpha[i] - beta, state.s_[i], q);
  }
  for (double& v : q) v = -v;
  return q;
}

Vector sgd_step(SgdState& state, std::span<const double> x, std::span<const double> grad) {
  if (state.velocity.size() != x.size()) state.velocity.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.velocity[i] = state.momentum * state.velocity[i] - state.learning_rate * grad[i];
  }
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += state.velocity[i];
  return out;
}

}  // namespace chromabrush::optim
