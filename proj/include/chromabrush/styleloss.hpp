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

#include <map>
#include <string>

#include "chromabrush/convnet.hpp"
#include "chromabrush/tensor.hpp"

namespace chromabrush {

// N x M view of a feature map: N channels, M = height * width positions.
class FeatureMatrix {
 public:
  // Throws ShapeError unless `data` is rank 2.
  explicit FeatureMatrix(Tensor data);
  // Flattens a C x H x W feature map.
  static FeatureMatrix from_feature_map(const Tensor& map);

  const Tensor& tensor() const noexcept { return data_; }
  std::size_t channels() const { return data_.extent(0); }
  std::size_t positions() const { return data_.extent(1); }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  Tensor data_;
};

// N x N, symmetric by construction.
class GramMatrix {
 public:
  explicit GramMatrix(Tensor data);
  const Tensor& tensor() const noexcept { return data_; }
  std::size_t size() const { return data_.extent(0); }

  friend bool operator==(const GramMatrix&, const GramMatrix&) = default;

 private:
  Tensor data_;
};

struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
  std::map<std::string, double> layer_weights;  // w_l per style layer

  // Throws ConfigError on negative weights or alpha + beta == 0.
  void validate() const;
};

struct LossTargets {
  std::string content_layer;
  FeatureMatrix content_target;
  std::map<std::string, GramMatrix> style_targets;
};

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;  // same shape as the features it differentiates
};

GramMatrix gram(const FeatureMatrix& features);

// 1/2 * sum (P - F)^2 and its gradient F - P.
LossAndGrad content_loss_grad(const FeatureMatrix& target, const FeatureMatrix& features);

// sum (A - G)^2 / (4 N^2 M^2) and its gradient (G - A) F / (N^2 M^2).
LossAndGrad style_layer_loss_grad(const GramMatrix& target, const FeatureMatrix& features);

// sum_l w_l E_l over identical key sets (ConfigError otherwise).
double total_style_loss(const std::map<std::string, double>& per_layer,
                        const std::map<std::string, double>& weights);

struct TotalLoss {
  double loss = 0.0;
  double content_part = 0.0;
  double style_part = 0.0;
  FeatureSet feature_grads;  // keyed like the captured features (C x H x W)
};

// alpha * L_content + beta * L_style with gradients w.r.t. each captured
// feature map. Throws CaptureError if a needed layer is missing.
TotalLoss total_loss_grad(const LossTargets& targets, const FeatureSet& features,
                          const LossWeights& weights);

}  // namespace chromabrush
