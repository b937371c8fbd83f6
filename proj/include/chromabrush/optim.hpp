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
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chromabrush::optim {

using Vector = std::vector<double>;

struct Evaluation {
  double loss = 0.0;
  Vector grad;
  // Loss components, when the objective reports them.
  std::optional<double> content;
  std::optional<double> style;
};

using Objective = std::function<Evaluation(std::span<const double> x)>;

// Limited-memory inverse-Hessian approximation.
class LbfgsState {
 public:
  explicit LbfgsState(std::size_t history_size = 10);

  // Stores (s, y) unless s.y <= 1e-10 |s||y|. Drops the oldest pair when
  // full. Returns whether the pair was kept.
  bool push(Vector s, Vector y);
  void clear();

  std::size_t history_size() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return s_.size(); }
  const std::deque<Vector>& s_list() const noexcept { return s_; }
  const std::deque<Vector>& y_list() const noexcept { return y_; }

 private:
  std::size_t capacity_;
  std::deque<Vector> s_;
  std::deque<Vector> y_;
  std::deque<double> rho_;

  friend Vector lbfgs_direction(const LbfgsState&, std::span<const double>);
};

// d = -H g by the two-loop recursion with H0 = gamma I, gamma = s.y / y.y of
// the newest pair (1 with no history).
Vector lbfgs_direction(const LbfgsState& state, std::span<const double> grad);

struct LineSearchParams {
  double c1 = 1e-4;
  double c2 = 0.9;
  std::size_t max_evals = 20;
  double initial_step = 1.0;
};

struct LineSearchResult {
  double step = 0.0;
  Evaluation eval;  // at x_new
  Vector x;
  std::size_t evals = 0;
  bool strong_wolfe = false;  // false: best Armijo step, curvature unmet
};

// Strong-Wolfe bracketing and zoom. Throws PreconditionError when g0.d >= 0
// and LineSearchError when no Armijo step is found within max_evals.
LineSearchResult wolfe_line_search(const Objective& objective, std::span<const double> x,
                                   std::span<const double> d, double f0,
                                   std::span<const double> g0, const LineSearchParams& params);

struct SgdState {
  double learning_rate = 1.0;
  double momentum = 0.9;
  Vector velocity;
};

// velocity <- momentum * velocity - lr * grad; returns x + velocity.
Vector sgd_step(SgdState& state, std::span<const double> x, std::span<const double> grad);

enum class Method { kLbfgs, kSgd };

struct TraceRecord;

struct MinimizeOptions {
  Method method = Method::kLbfgs;
  std::size_t iterations = 1000;
  std::size_t history_size = 10;
  // Clear L-BFGS history every K iterations (0 = never).
  std::size_t history_reset_every = 0;
  LineSearchParams line_search;
  double learning_rate = 1.0;
  double momentum = 0.9;
  // Iterates with ||grad|| at or below this are treated as stationary.
  double gradient_tolerance = 0.0;
  // Sees each trace record as it is appended.
  std::function<void(const TraceRecord&)> observer;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  std::optional<double> content;
  std::optional<double> style;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct MinimizeResult {
  Vector x;
  std::vector<TraceRecord> trace;
  bool failed = false;
  std::string failure;
};

// Called with the iteration index before that iteration's gradient
// evaluation. Returns true when it changed the objective, which forces a
// fresh evaluation at the current point.
using IterationHook = std::function<bool(std::size_t iteration)>;

MinimizeResult minimize(const Objective& objective, Vector x0, const MinimizeOptions& options,
                        const IterationHook& hook = {});

}  // namespace chromabrush::optim
