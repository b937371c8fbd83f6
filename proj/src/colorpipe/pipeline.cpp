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
#include <limits>
#include <random>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {

LayerSelection LayerSelection::vgg19_default() {
  LayerSelection s;
  s.content_layer = "conv4_2";
  for (const char* name : {"conv1_1", "conv2_1", "conv3_1", "conv4_1", "conv5_1"}) {
    s.style_weights[name] = 1.0 / 5.0;
  }
  return s;
}

std::set<std::string> LayerSelection::capture_set() const {
  std::set<std::string> out{content_layer};
  for (const auto& [name, w] : style_weights) out.insert(name);
  return out;
}

void NetworkBundle::validate() const {
  for (const std::string& name : layers.capture_set()) {
    if (!topology.contains(name)) {
      throw ConfigError("selected layer '" + name + "' is not part of the network");
    }
  }
  if (layers.style_weights.empty() && layers.content_layer.empty()) {
    throw ConfigError("no content or style layers selected");
  }
}

StyleWeightSchedule::StyleWeightSchedule(double beta0, double decay_per_iter)
    : beta0_(beta0), decay_(decay_per_iter), factor_(1.0 - decay_per_iter) {
  if (!(beta0 > 0.0)) throw ConfigError("initial style weight must be > 0");
  if (!(decay_per_iter >= 0.0 && decay_per_iter < 1.0)) {
    throw ConfigError("decay per iteration must lie in [0, 1)");
  }
}

double StyleWeightSchedule::beta(std::size_t k) const {
  double b = beta0_;
  for (std::size_t i = 0; i < k; ++i) b *= factor_;
  return b;
}

void RunConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(decay_per_iter >= 0.0 && decay_per_iter < 1.0)) {
    throw ConfigError("decay must lie in [0, 1)");
  }
  if (max_side < 32) throw ConfigError("max side must be >= 32 pixels");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(effective_beta0() > 0.0)) throw ConfigError("beta must be > 0");
  if (!(sgd_lr > 0.0)) throw ConfigError("SGD learning rate must be > 0");
  if (!(sgd_momentum >= 0.0 && sgd_momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(noise_std >= 0.0)) throw ConfigError("noise std must be >= 0");
}

LossTargets prepare_targets(const ImageBuffer& content, const ImageBuffer& style,
                            const NetworkBundle& network) {
  network.validate();
  const LayerSelection& sel = network.layers;

  const std::set<std::string> content_capture{sel.content_layer};
  auto [content_features, content_tape] =
      forward_collect(content.pixels, network.topology, network.weights, content_capture);

  std::set<std::string> style_capture;
  for (const auto& [name, w] : sel.style_weights) style_capture.insert(name);
  const ImageBuffer matched = resize_buffer(style, content.height(), content.width());
  auto [style_features, style_tape] =
      forward_collect(matched.pixels, network.topology, network.weights, style_capture);

  LossTargets targets{sel.content_layer,
                      FeatureMatrix::from_feature_map(content_features.at(sel.content_layer)),
                      {}};
  for (const auto& [name, map] : style_features) {
    targets.style_targets.emplace(name, gram(FeatureMatrix::from_feature_map(map)));
  }
  return targets;
}

ImageBuffer initialize_canvas(const RunConfig& config, const ImageBuffer& content) {
  ImageBuffer canvas = content;
  canvas.provenance = Provenance::kCanvas;
  if (config.init == InitMode::kContent) return canvas;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_std);
  for (double& v : canvas.pixels.data()) v = noise(rng);
  return canvas;
}

ColorizationObjective::ColorizationObjective(const NetworkBundle& network, LossTargets targets,
                                             double alpha, double beta, Shape canvas_shape)
    : network_(&network),
      targets_(std::move(targets)),
      weights_{alpha, beta, network.layers.style_weights},
      canvas_shape_(std::move(canvas_shape)),
      capture_(network.layers.capture_set()) {
  weights_.validate();
}

optim::Evaluation ColorizationObjective::operator()(std::span<const double> x) const {
  const Tensor image(canvas_shape_, std::vector<double>(x.begin(), x.end()));
  auto [features, tape] = forward_collect(image, network_->topology, network_->weights, capture_);
  TotalLoss loss = total_loss_grad(targets_, features, weights_);
  Tensor grad = backprop_to_input(tape, loss.feature_grads);
  optim::Evaluation out;
  out.loss = loss.loss;
  out.grad.assign(grad.data().begin(), grad.data().end());
  out.content = loss.content_part;
  out.style = loss.style_part;
  return out;
}

RunResult colorize(const RunConfig& config, const NetworkBundle& network,
                   const ImageBuffer& content, const ImageBuffer& style,
                   const ProgressCallback& progress) {
  return colorize(config, network, content, prepare_targets(content, style, network), progress);
}

namespace {

TraceRow to_row(const optim::TraceRecord& r, double beta) {
  return {r.iteration, beta, r.loss, r.content.value_or(0.0), r.style.value_or(0.0), r.grad_norm,
          r.step};
}

}  // namespace

RunResult colorize(const RunConfig& config, const NetworkBundle& network,
                   const ImageBuffer& content, const LossTargets& targets,
                   const ProgressCallback& progress) {
  config.validate();
  const StyleWeightSchedule schedule(config.effective_beta0(), config.decay_per_iter);
  const ImageBuffer canvas = initialize_canvas(config, content);
  ColorizationObjective objective(network, targets, config.alpha, schedule.beta0(),
                                  canvas.pixels.shape());

  optim::MinimizeOptions options;
  options.method = config.optimizer;
  options.iterations = config.iterations;
  options.history_reset_every = config.history_reset_every;
  options.learning_rate = config.sgd_lr;
  options.momentum = config.sgd_momentum;

  std::vector<double> betas;
  betas.reserve(config.iterations);
  const optim::IterationHook hook = [&](std::size_t k) {
    const double beta = k == 0 ? schedule.beta0() : betas.back() * schedule.factor();
    betas.push_back(beta);
    const bool changed = beta != objective.beta();
    objective.set_beta(beta);
    return changed;
  };
  if (progress) {
    options.observer = [&](const optim::TraceRecord& r) { progress(to_row(r, betas[r.iteration])); };
  }
  const optim::Objective fn = [&](std::span<const double> x) { return objective(x); };

  optim::MinimizeResult minimized = optim::minimize(fn, canvas.pixels.values(), options, hook);

  RunResult result;
  result.failed = minimized.failed;
  result.failure = minimized.failure;
  result.trace.reserve(minimized.trace.size());
  for (const optim::TraceRecord& r : minimized.trace) {
    result.trace.push_back(to_row(r, betas[r.iteration]));
  }
  result.canvas = canvas;
  result.canvas.pixels = Tensor(canvas.pixels.shape(), std::move(minimized.x));
  const optim::Evaluation last = objective(result.canvas.pixels.values());
  result.final_loss = std::isfinite(last.loss) ? last.loss : std::numeric_limits<double>::infinity();
  return result;
}

RunResult run_colorization(const RunConfig& config, const NetworkBundle& network,
                           const ProgressCallback& progress) {
  config.validate();
  const ImageBuffer content =
      preprocess(config.content_path, config.max_side, config.grayscale_content, Provenance::kContent);
  const ImageBuffer style = preprocess(config.style_path, config.max_side, false, Provenance::kStyle);
  RunResult result = colorize(config, network, content, style, progress);
  write_png(config.output_path, deprocess(result.canvas));
  write_trace_csv(trace_path_for(config.output_path), result.trace);
  return result;
}

}  // namespace chromabrush
