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

#include "chromabrush/styleloss.hpp"

#include "chromabrush/error.hpp"
#include "chromabrush/kernels.hpp"

namespace chromabrush {

FeatureMatrix::FeatureMatrix(Tensor data) : data_(std::move(data)) {
  if (data_.rank() != 2) {
    throw ShapeError("feature matrix must be rank 2, got " + shape_to_string(data_.shape()));
  }
}

FeatureMatrix FeatureMatrix::from_feature_map(const Tensor& map) {
  if (map.rank() != 3) {
    throw ShapeError("feature map must be C x H x W, got " + shape_to_string(map.shape()));
  }
  return FeatureMatrix(map.reshaped({map.extent(0), map.extent(1) * map.extent(2)}));
}

GramMatrix::GramMatrix(Tensor data) : data_(std::move(data)) {
  if (data_.rank() != 2 || data_.extent(0) != data_.extent(1)) {
    throw ShapeError("Gram matrix must be square, got " + shape_to_string(data_.shape()));
  }
}

void LossWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be >= 0");
  if (!(alpha + beta > 0.0)) throw ConfigError("alpha + beta must be > 0");
  for (const auto& [name, w] : layer_weights) {
    if (!(w >= 0.0)) throw ConfigError("style weight for '" + name + "' must be >= 0");
  }
}

GramMatrix gram(const FeatureMatrix& features) {
  const Tensor& f = features.tensor();
  const std::size_t n = f.extent(0), m = f.extent(1);
  Tensor g({n, n});
  const double* base = f.data().data();
  // Upper triangle once, mirrored: exact symmetry.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernels::active().dot(base + i * m, base + j * m, m);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  }
  return GramMatrix(std::move(g));
}

LossAndGrad content_loss_grad(const FeatureMatrix& target, const FeatureMatrix& features) {
  require_same_shape(target.tensor(), features.tensor(), "content_loss_grad");
  Tensor diff = axpy(-1.0, target.tensor(), features.tensor());
  const double loss = 0.5 * sum_squares(diff);
  return {loss, std::move(diff)};
}

LossAndGrad style_layer_loss_grad(const GramMatrix& target, const FeatureMatrix& features) {
  const std::size_t n = features.channels();
  if (target.size() != n) {
    throw ShapeError("style_layer_loss_grad: target Gram " + shape_to_string(target.tensor().shape()) +
                     " vs " + std::to_string(n) + " feature channels");
  }
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(features.positions());
  const double norm = nd * nd * md * md;

  const GramMatrix g = gram(features);
  const Tensor residual = axpy(-1.0, target.tensor(), g.tensor());  // G - A
  const double loss = sum_squares(residual) / (4.0 * norm);
  Tensor grad = matmul(residual, features.tensor());
  for (double& v : grad.data()) v /= norm;
  return {loss, std::move(grad)};
}

double total_style_loss(const std::map<std::string, double>& per_layer,
                        const std::map<std::string, double>& weights) {
  if (per_layer.size() != weights.size()) {
    throw ConfigError("style loss layers and style weights have different key sets");
  }
  double total = 0.0;
  for (const auto& [name, loss] : per_layer) {
    const auto it = weights.find(name);
    if (it == weights.end()) throw ConfigError("no style weight for layer '" + name + "'");
    total += it->second * loss;
  }
  return total;
}

TotalLoss total_loss_grad(const LossTargets& targets, const FeatureSet& features,
                          const LossWeights& weights) {
  const auto feature = [&](const std::string& name) -> const Tensor& {
    const auto it = features.find(name);
    if (it == features.end()) throw CaptureError("features for layer '" + name + "' were not captured");
    return it->second;
  };
  const auto accumulate = [](FeatureSet& grads, const std::string& name, double scale,
                             const Tensor& g, const Shape& shape) {
    Tensor scaled = g.reshaped(shape);
    for (double& v : scaled.data()) v *= scale;
    const auto it = grads.find(name);
    if (it == grads.end()) {
      grads.emplace(name, std::move(scaled));
    } else {
      it->second = axpy(1.0, scaled, it->second);
    }
  };

  TotalLoss out;
  {
    const Tensor& map = feature(targets.content_layer);
    const LossAndGrad c = content_loss_grad(targets.content_target, FeatureMatrix::from_feature_map(map));
    out.content_part = c.loss;
    if (weights.alpha != 0.0) accumulate(out.feature_grads, targets.content_layer, weights.alpha, c.grad, map.shape());
  }

  std::map<std::string, double> per_layer;
  for (const auto& [name, target] : targets.style_targets) {
    const Tensor& map = feature(name);
    const LossAndGrad s = style_layer_loss_grad(target, FeatureMatrix::from_feature_map(map));
    per_layer[name] = s.loss;
    const auto w = weights.layer_weights.find(name);
    if (w == weights.layer_weights.end()) throw ConfigError("no style weight for layer '" + name + "'");
    const double scale = weights.beta * w->second;
    if (scale != 0.0) accumulate(out.feature_grads, name, scale, s.grad, map.shape());
  }
  out.style_part = total_style_loss(per_layer, weights.layer_weights);
  out.loss = weights.alpha * out.content_part + weights.beta * out.style_part;
  return out;
}

}  // namespace chromabrush
