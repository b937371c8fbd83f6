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
#include <limits>

#include "chromabrush/error.hpp"
#include "chromabrush/kernels.hpp"
#include "chromabrush/optim.hpp"

namespace chromabrush::optim {
namespace {

struct Probe {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative g(x + step d) . d
  Evaluation eval;
  Vector x;
};

// Minimizer of the cubic through (a, fa, ga) and (b, fb, gb), kept at least
// 10% of the bracket away from either end; bisection when the cubic has no
// real minimizer.
double interpolate(double a, double fa, double ga, double b, double fb, double gb) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  double t = 0.5 * (a + b);
  if (disc >= 0.0 && std::isfinite(disc) && std::isfinite(fb)) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = gb - ga + 2.0 * d2;
    if (denom != 0.0) {
      const double c = b - (b - a) * (gb + d2 - d1) / denom;
      if (std::isfinite(c)) t = c;
    }
  }
  return std::clamp(t, lo + margin, hi - margin);
}

// Zero of the linear interpolant of the slope, with the same 10% margin.
double secant(double a, double ga, double b, double gb) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  double t = 0.5 * (a + b);
  if (ga != gb) {
    const double c = a - ga * (b - a) / (gb - ga);
    if (std::isfinite(c)) t = c;
  }
  return std::clamp(t, lo + margin, hi - margin);
}

}  // namespace

LineSearchResult wolfe_line_search(const Objective& objective, std::span<const double> x,
                                   std::span<const double> d, double f0,
                                   std::span<const double> g0, const LineSearchParams& params) {
  const double slope0 = kernels::dot(g0, d);
  if (!(slope0 < 0.0)) {
    throw PreconditionError("line search direction is not a descent direction (g.d = " +
                            std::to_string(slope0) + ")");
  }
  if (!(0.0 < params.c1 && params.c1 < params.c2 && params.c2 < 1.0)) {
    throw ConfigError("line search requires 0 < c1 < c2 < 1");
  }

  std::size_t evals = 0;
  std::optional<Probe> best;  // lowest f among Armijo-satisfying probes

  const auto probe = [&](double step) {
    Probe p;
    p.step = step;
    p.x.assign(x.begin(), x.end());
    kernels::axpy(step, d, p.x);
    p.eval = objective(p.x);
    ++evals;
    p.f = p.eval.loss;
    const bool finite = std::isfinite(p.f) &&
                        std::all_of(p.eval.grad.begin(), p.eval.grad.end(),
                                    [](double v) { return std::isfinite(v); });
    if (!finite) {
      p.f = std::numeric_limits<double>::infinity();
      p.slope = std::numeric_limits<double>::quiet_NaN();
    } else {
      p.slope = kernels::dot(p.eval.grad, d);
    }
    return p;
  };
  // Sufficient decrease. Once f is flat to rounding, fall back to the
  // approximate Wolfe test on the directional derivative.
  const double f_noise = 1e-12 * std::abs(f0);
  const auto armijo = [&](const Probe& p) {
    if (p.f <= f0 + params.c1 * p.step * slope0) return true;
    return p.f <= f0 + f_noise && p.slope <= (2.0 * params.c1 - 1.0) * slope0;
  };
  // Orders two probes by f, or by slope sign when both are flat to rounding.
  const auto flat = [&](const Probe& p) { return std::abs(p.f - f0) <= f_noise; };
  const auto not_below = [&](const Probe& p, const Probe& ref) {
    if (flat(p) && flat(ref)) return p.slope >= 0.0;
    return p.f >= ref.f;
  };
  const auto curvature = [&](const Probe& p) {
    return std::abs(p.slope) <= -params.c2 * slope0;
  };
  const auto note = [&](const Probe& p) {
    if (armijo(p) && (!best || p.f < best->f)) best = p;
  };
  const auto accept = [&](Probe p, bool wolfe) {
    return LineSearchResult{p.step, std::move(p.eval), std::move(p.x), evals, wolfe};
  };

  // Zoom inside a bracket whose `lo` end satisfies Armijo and has the lower f.
  const auto zoom = [&](Probe lo, Probe hi) -> std::optional<LineSearchResult> {
    while (evals < params.max_evals) {
      double step = 0.5 * (lo.step + hi.step);
      if (std::isfinite(hi.f) && std::isfinite(hi.slope)) {
        step = flat(lo) && flat(hi)
                   ? secant(lo.step, lo.slope, hi.step, hi.slope)
                   : interpolate(lo.step, lo.f, lo.slope, hi.step, hi.f, hi.slope);
      }
      if (std::abs(hi.step - lo.step) <= std::numeric_limits<double>::epsilon() * std::abs(lo.step))
        break;
      Probe p = probe(step);
      note(p);
      if (!armijo(p) || not_below(p, lo)) {
        hi = std::move(p);
      } else {
        if (curvature(p)) return accept(std::move(p), true);
        if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = std::move(p);
      }
    }
    return std::nullopt;
  };

  Probe prev;
  prev.step = 0.0;
  prev.f = f0;
  prev.slope = slope0;
  double step = params.initial_step > 0.0 ? params.initial_step : 1.0;
  bool first = true;
  while (evals < params.max_evals) {
    Probe p = probe(step);
    note(p);
    if (!armijo(p) || (!first && not_below(p, prev))) {
      if (auto r = zoom(prev, std::move(p))) return std::move(*r);
      break;
    }
    if (curvature(p)) return accept(std::move(p), true);
    if (p.slope >= 0.0) {
      if (auto r = zoom(p, prev)) return std::move(*r);
      break;
    }
    prev = std::move(p);
    step *= 2.0;
    first = false;
  }

  if (best) return accept(std::move(*best), false);
  throw LineSearchError("line search found no decrease in " + std::to_string(evals) +
                        " evaluations");
}

}  // namespace chromabrush::optim
