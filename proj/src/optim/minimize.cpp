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

#include <algorithm>
#include <cmath>

#include "chromabrush/error.hpp"
#include "chromabrush/kernels.hpp"
#include "chromabrush/optim.hpp"

namespace chromabrush::optim {
namespace {

bool finite(const Evaluation& e) {
  return std::isfinite(e.loss) &&
         std::all_of(e.grad.begin(), e.grad.end(), [](double v) { return std::isfinite(v); });
}

double norm(std::span<const double> v) { return std::sqrt(kernels::sum_squares(v)); }

// First step along steepest descent, scaled so the initial trial moves each
// coordinate by at most ~1 unit.
double steepest_initial_step(std::span<const double> g) {
  double l1 = 0.0;
  for (double v : g) l1 += std::abs(v);
  return l1 > 0.0 ? std::min(1.0, 1.0 / l1) : 1.0;
}

Evaluation evaluate(const Objective& objective, const Vector& x) {
  Evaluation e = objective(x);
  if (e.grad.size() != x.size()) {
    throw ShapeError("objective returned gradient of length " + std::to_string(e.grad.size()) +
                     " for " + std::to_string(x.size()) + " parameters");
  }
  return e;
}

TraceRecord record_for(std::size_t k, const Evaluation& e, double grad_norm) {
  TraceRecord r;
  r.iteration = k;
  r.loss = e.loss;
  r.content = e.content;
  r.style = e.style;
  r.grad_norm = grad_norm;
  return r;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, Vector x0, const MinimizeOptions& options,
                        const IterationHook& hook) {
  if (options.iterations == 0) throw ConfigError("minimize needs at least one iteration");

  MinimizeResult result;
  result.x = std::move(x0);
  result.trace.reserve(options.iterations);

  LbfgsState lbfgs(options.history_size);
  SgdState sgd{options.learning_rate, options.momentum, Vector(result.x.size(), 0.0)};
  std::optional<Evaluation> current;  // evaluation at result.x under the live objective
  Vector last_finite;                 // SGD: iterate before the most recent step
  const auto push = [&](const TraceRecord& row) {
    result.trace.push_back(row);
    if (options.observer) options.observer(row);
  };

  for (std::size_t k = 0; k < options.iterations; ++k) {
    const bool changed = hook ? hook(k) : false;
    if (!current || changed) current = evaluate(objective, result.x);
    if (!finite(*current)) {
      if (!last_finite.empty()) result.x = std::move(last_finite);
      result.failed = true;
      result.failure = "objective is not finite at iteration " + std::to_string(k);
      break;
    }
    const double grad_norm = norm(current->grad);
    TraceRecord row = record_for(k, *current, grad_norm);

    if (grad_norm <= options.gradient_tolerance) {
      push(row);
      continue;
    }

    if (options.method == Method::kSgd) {
      last_finite = result.x;
      result.x = sgd_step(sgd, result.x, current->grad);
      current.reset();
      row.step = options.learning_rate;
      push(row);
      continue;
    }

    if (options.history_reset_every > 0 && k > 0 && k % options.history_reset_every == 0) {
      lbfgs.clear();
    }
    const Vector& g = current->grad;
    Vector d = lbfgs_direction(lbfgs, g);
    LineSearchParams params = options.line_search;
    if (lbfgs.size() == 0) params.initial_step = steepest_initial_step(g);
    if (!(kernels::dot(g, d) < 0.0)) {
      lbfgs.clear();
      d = lbfgs_direction(lbfgs, g);
      params.initial_step = steepest_initial_step(g);
    }

    std::optional<LineSearchResult> ls;
    try {
      ls = wolfe_line_search(objective, result.x, d, current->loss, g, params);
    } catch (const LineSearchError&) {
      // Retry once from scratch along steepest descent.
      lbfgs.clear();
      d = lbfgs_direction(lbfgs, g);
      params = options.line_search;
      params.initial_step = steepest_initial_step(g);
      try {
        ls = wolfe_line_search(objective, result.x, d, current->loss, g, params);
      } catch (const LineSearchError& e) {
        push(row);
        result.failed = true;
        result.failure = "iteration " + std::to_string(k) + ": " + e.what();
        break;
      }
    }

    Vector s = ls->x;
    kernels::axpy(-1.0, result.x, s);
    Vector y = ls->eval.grad;
    kernels::axpy(-1.0, g, y);
    lbfgs.push(std::move(s), std::move(y));

    row.step = ls->step;
    result.x = std::move(ls->x);
    current = std::move(ls->eval);
    push(row);
  }
  return result;
}

}  // namespace chromabrush::optim
