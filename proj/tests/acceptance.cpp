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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "chromabrush/cli.hpp"
#include "chromabrush/colorpipe.hpp"
#include "chromabrush/optim.hpp"
#include "chromabrush/styleloss.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace chromabrush;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

FeatureMatrix fm(std::size_t n, std::size_t m, const oracle::Vec& v) { return FeatureMatrix(Tensor({n, m}, v)); }
oracle::Mat om(std::size_t n, std::size_t m, const oracle::Vec& v) {
  oracle::Mat out(n, m);
  out.v = v;
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict loss_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 8, m = 1 + rng() % 16;
    const oracle::Vec p = oracle::random_vec(rng, n * m), f = oracle::random_vec(rng, n * m);
    const oracle::Mat a = oracle::gram(om(n, m, oracle::random_vec(rng, n * m)));
    worst = std::max(worst, oracle::rel_err(content_loss_grad(fm(n, m, p), fm(n, m, f)).loss,
                                            oracle::content_loss(om(n, m, p), om(n, m, f))));
    const Tensor g = gram(fm(n, m, f)).tensor();
    worst = std::max(worst, oracle::max_rel_err(g.values(), oracle::gram(om(n, m, f)).v));
    worst = std::max(worst, oracle::rel_err(style_layer_loss_grad(GramMatrix(Tensor({n, n}, a.v)), fm(n, m, f)).loss,
                                            oracle::style_loss(a, om(n, m, f))));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 5.0, "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Verdict gradient_exactness() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8;
    const oracle::Vec p = oracle::random_vec(rng, n * m), f = oracle::random_vec(rng, n * m);
    const oracle::Mat a = oracle::gram(om(n, m, oracle::random_vec(rng, n * m)));
    const oracle::Vec cfd = oracle::fd_gradient(
        [&](const oracle::Vec& x) { return oracle::content_loss(om(n, m, p), om(n, m, x)); }, f, 1e-6);
    worst = std::max(worst, oracle::max_rel_err(content_loss_grad(fm(n, m, p), fm(n, m, f)).grad.values(), cfd, 1e-9));
    const oracle::Vec sfd = oracle::fd_gradient(
        [&](const oracle::Vec& x) { return oracle::style_loss(a, om(n, m, x)); }, f, 1e-6);
    worst = std::max(worst, oracle::max_rel_err(
                                style_layer_loss_grad(GramMatrix(Tensor({n, n}, a.v)), fm(n, m, f)).grad.values(),
                                sfd, 1e-9));
  }
  return {worst < 1e-6, "max rel err " + fmt("%.2e", worst)};
}

Verdict end_to_end_gradient() {
  const auto t0 = Clock::now();
  const NetworkBundle net = fixtures::two_conv_bundle(4, 303);
  std::mt19937_64 rng(303);
  const ImageBuffer content{Tensor({3, 8, 8}, oracle::random_vec(rng, 192)), 8, 8, Provenance::kContent};
  const ImageBuffer style{Tensor({3, 8, 8}, oracle::random_vec(rng, 192)), 8, 8, Provenance::kStyle};
  const ColorizationObjective obj(net, prepare_targets(content, style, net), 1.0, 10.0, {3, 8, 8});
  const oracle::Vec x = oracle::random_vec(rng, 192);
  const oracle::Vec fd = oracle::fd_gradient([&](const oracle::Vec& v) { return obj(v).loss; }, x, 1e-5);
  const double err = oracle::max_rel_err(obj(x).grad, fd, 1e-8);
  const double secs = seconds_since(t0);
  return {err < 1e-4 && secs < 60.0, "max rel err " + fmt("%.2e", err) + ", " + fmt("%.3f", secs) + " s"};
}

Verdict adjoint() {
  std::mt19937_64 rng(404);
  auto rt = [&](Shape s) { return Tensor(s, oracle::random_vec(rng, shape_numel(s))); };
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t ci = 1 + rng() % 4, co = 1 + rng() % 4, h = 1 + rng() % 9, w = 1 + rng() % 9;
    const Tensor k = rt({co, ci, 3, 3}), v = rt({ci, h, w}), g = rt({co, h, w});
    worst = std::max(worst, oracle::rel_err(dot(conv2d_backward_input(g, k), v),
                                            dot(g, conv2d(v, k, Tensor({co}, 0.0)))));

    const Tensor x = rt({ci, h, w}), gr = rt({ci, h, w});
    oracle::Vec jv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) jv[i] = x[i] > 0.0 ? v[i] : 0.0;
    worst = std::max(worst, oracle::rel_err(dot(relu_backward(gr, x), v), oracle::dot(gr.values(), jv)));

    const std::size_t oh = (h + 1) / 2, ow = (w + 1) / 2;
    const Tensor gp = rt({ci, oh, ow});
    for (PoolMode mode : {PoolMode::kAvg, PoolMode::kMax}) {
      oracle::Vec pv(ci * oh * ow);
      for (std::size_t c = 0; c < ci; ++c)
        for (std::size_t oy = 0; oy < oh; ++oy)
          for (std::size_t ox = 0; ox < ow; ++ox) {
            double sum = 0.0, best = -1e300, pick = 0.0;
            int cells = 0;
            for (std::size_t y = 2 * oy; y < std::min(h, 2 * oy + 2); ++y)
              for (std::size_t xx = 2 * ox; xx < std::min(w, 2 * ox + 2); ++xx) {
                sum += v.at(c, y, xx);
                ++cells;
                if (x.at(c, y, xx) > best) {
                  best = x.at(c, y, xx);
                  pick = v.at(c, y, xx);
                }
              }
            pv[(c * oh + oy) * ow + ox] = mode == PoolMode::kAvg ? sum / cells : pick;
          }
      worst = std::max(worst, oracle::rel_err(dot(pool2_backward(gp, x, mode), v), oracle::dot(gp.values(), pv)));
    }
  }
  return {worst <= 1e-8, "max rel err " + fmt("%.2e", worst)};
}

Verdict lbfgs() {
  std::string detail;
  bool pass = true;

  optim::MinimizeOptions opt;
  opt.iterations = 200;
  const auto rosen = [](std::span<const double> v) {
    const double x = v[0], y = v[1];
    return optim::Evaluation{(1 - x) * (1 - x) + 100 * (y - x * x) * (y - x * x),
                             {-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)}, {}, {}};
  };
  const optim::MinimizeResult r = optim::minimize(rosen, {-1.2, 1.0}, opt);
  const double dist = std::hypot(r.x[0] - 1.0, r.x[1] - 1.0);
  pass &= dist < 1e-6;
  detail += "rosenbrock dist " + fmt("%.2e", dist);

  std::mt19937_64 rng(505);
  double worst_grad = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Mat a = oracle::random_spd(rng, 5, 5.0);
    const oracle::Vec b = oracle::random_vec(rng, 5);
    const auto quad = [&](std::span<const double> x) {
      optim::Evaluation e;
      e.grad.assign(5, 0.0);
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) e.grad[i] += a(i, j) * x[j];
        e.loss += 0.5 * x[i] * e.grad[i] - b[i] * x[i];
        e.grad[i] -= b[i];
      }
      return e;
    };
    opt.iterations = 15;
    const optim::MinimizeResult qr = optim::minimize(quad, oracle::random_vec(rng, 5, -2, 2), opt);
    const auto g = quad(qr.x).grad;
    worst_grad = std::max(worst_grad, std::sqrt(oracle::dot(g, g)));
  }
  pass &= worst_grad < 1e-10;
  detail += ", quadratic grad " + fmt("%.2e", worst_grad);

  double worst_dir = 0.0;
  for (std::size_t n = 2; n <= 10; ++n) {
    oracle::Mat q(n, n), a(n, n);
    q.v = oracle::random_vec(rng, n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = i == j ? 0.5 : 0.0;
        for (std::size_t t = 0; t < n; ++t) a(i, j) += q(t, i) * q(t, j);
      }
    optim::LbfgsState state(10);
    std::vector<oracle::Vec> ss, ys;
    for (std::size_t p = 0; p < n; ++p) {
      oracle::Vec s = oracle::random_vec(rng, n), y(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * s[j];
      state.push(s, y);
      ss.push_back(s);
      ys.push_back(y);
    }
    oracle::Mat h0(n, n);
    for (std::size_t i = 0; i < n; ++i) h0(i, i) = oracle::dot(ss.back(), ys.back()) / oracle::dot(ys.back(), ys.back());
    const oracle::Mat h = oracle::bfgs_inverse(h0, ss, ys);
    const oracle::Vec g = oracle::random_vec(rng, n);
    const optim::Vector d = optim::lbfgs_direction(state, g);
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < n; ++j) e -= h(i, j) * g[j];
      worst_dir = std::max(worst_dir, oracle::rel_err(d[i], e));
    }
  }
  pass &= worst_dir <= 1e-8;
  detail += ", two-loop vs dense " + fmt("%.2e", worst_dir);
  return {pass, detail};
}

Verdict schedule() {
  const StyleWeightSchedule s(RunConfig{}.effective_beta0(), RunConfig{}.decay_per_iter);
  const double r1 = s.beta(1) / s.beta(0);
  const double r1000 = s.beta(1000) / s.beta(0);
  const double expect = std::exp(1000.0 * std::log(0.9975));
  const bool pass = r1 == 0.9975 && std::abs(r1000 - expect) <= 1e-12;
  return {pass, "beta(1)/beta(0) = " + fmt("%.17g", r1) + ", beta(1000)/beta(0) = " + fmt("%.12f", r1000) +
                    " (|diff| " + fmt("%.1e", std::abs(r1000 - expect)) + ")"};
}

Verdict defaults() {
  std::ostringstream out, err;
  const int code = cli::main_entry({"colorize", "--content", "c.png", "--style", "s.png", "--out", "o.png",
                                    "--dry-run"},
                                   out, err);
  std::map<std::string, std::string> header;
  std::istringstream lines(err.str());
  for (std::string line; std::getline(lines, line);) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    header[line.substr(line.find_first_not_of(' '), colon - line.find_first_not_of(' '))] = line.substr(colon + 2);
  }
  const bool pass = code == 0 && header["content_layer"] == "conv4_2" &&
                    header["style_layers"] == "conv1_1=0.2 conv2_1=0.2 conv3_1=0.2 conv4_1=0.2 conv5_1=0.2" &&
                    header["iterations"] == "1000" && header["optimizer"] == "lbfgs";
  return {pass, "content " + header["content_layer"] + "; style " + header["style_layers"] + "; iterations " +
                    header["iterations"] + "; optimizer " + header["optimizer"]};
}

Verdict fixed_point() {
  const fixtures::ScratchDir dir("accept_fixed");
  const ByteImage gray = to_grayscale(fixtures::pattern_image(48, 48, 606));
  write_png(dir / "gray.png", gray);
  RunConfig c;
  c.content_path = c.style_path = dir / "gray.png";
  c.output_path = dir / "out.png";
  c.init = InitMode::kContent;
  c.iterations = 5;
  c.max_side = 64;
  const RunResult r = run_colorization(c, fixtures::four_conv_bundle(606));
  const ByteImage out = read_image(c.output_path);
  int worst = 0;
  for (std::size_t i = 0; i < gray.rgb.size(); ++i) worst = std::max(worst, std::abs(int(out.rgb[i]) - int(gray.rgb[i])));
  const double loss0 = r.trace.front().total;
  return {loss0 == 0.0 && worst <= 1 && out.rgb.size() == gray.rgb.size(),
          "iteration-0 loss " + fmt("%g", loss0) + ", max pixel diff " + std::to_string(worst)};
}

Verdict fig2_harness() {
  const auto t0 = Clock::now();
  const NetworkBundle net = fixtures::four_conv_bundle(707);
  const ImageBuffer content = preprocess_image(fixtures::pattern_image(64, 64, 1), 64, true);
  const ImageBuffer style = preprocess_image(fixtures::pattern_image(64, 64, 2), 64, false);
  RunConfig c;
  c.iterations = 100;
  c.seed = 7;
  c.max_side = 64;
  c.sgd_lr = 1e-3;
  const CompareResult r = compare_optimizers(c, net, content, style);
  const double secs = seconds_since(t0);
  bool complete = r.panels.size() == 4;
  for (const auto& [p, i] : r.panels) complete &= r.runs[i].result.trace.size() == c.iterations || r.runs[i].result.failed;
  const double d = r.panel('d').result.final_loss, b = r.panel('b').result.final_loss;
  return {complete && d <= b && secs < 600.0,
          "lbfgs-decay " + fmt("%.6g", d) + " vs best sgd-decay " + fmt("%.6g", b) + " (lr " +
              fmt("%g", r.panel('b').learning_rate) + "), sgd-fixed " + fmt("%.6g", r.panel('a').result.final_loss) +
              ", lbfgs-fixed " + fmt("%.6g", r.panel('c').result.final_loss) + ", " + fmt("%.1f", secs) + " s"};
}

Verdict determinism() {
  const fixtures::ScratchDir dir("accept_det");
  write_png(dir / "content.png", fixtures::pattern_image(48, 40, 808));
  write_png(dir / "style.png", fixtures::pattern_image(48, 48, 809));
  const NetworkBundle net = fixtures::four_conv_bundle(808);
  RunConfig c;
  c.content_path = dir / "content.png";
  c.style_path = dir / "style.png";
  c.iterations = 10;
  c.seed = 3;
  c.max_side = 48;
  c.output_path = dir / "a.png";
  run_colorization(c, net);
  c.output_path = dir / "b.png";
  run_colorization(c, net);
  const bool png = slurp(dir / "a.png") == slurp(dir / "b.png");
  const bool csv = slurp(dir / "a.csv") == slurp(dir / "b.csv");
  return {png && csv && !slurp(dir / "a.png").empty(),
          std::string("png ") + (png ? "identical" : "differs") + ", trace " + (csv ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"loss formula oracles", loss_oracles},
      {"gradient exactness", gradient_exactness},
      {"end-to-end gradient", end_to_end_gradient},
      {"adjoint property", adjoint},
      {"L-BFGS correctness", lbfgs},
      {"style weight schedule", schedule},
      {"defaults conformance", defaults},
      {"fixed-point smoke test", fixed_point},
      {"optimizer comparison harness", fig2_harness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
