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

#include "chromabrush/convnet.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {

std::pair<FeatureSet, Tape> forward_collect(const Tensor& image, const NetworkTopology& topology,
                                            const WeightStore& weights,
                                            const std::set<std::string>& capture) {
  if (image.rank() != 3 || image.extent(0) != topology.input_channels()) {
    throw ShapeError("forward_collect: input " + shape_to_string(image.shape()) + " but network expects " +
                     std::to_string(topology.input_channels()) + " channels");
  }
  Tape tape;
  tape.topology_ = &topology;
  tape.weights_ = &weights;
  tape.input_shape_ = image.shape();
  for (const std::string& name : capture) tape.captures_[name] = topology.capture_index(name);

  std::size_t depth = 0;
  for (const auto& [name, index] : tape.captures_) depth = std::max(depth, index + 1);
  tape.depth_ = depth;
  tape.saved_inputs_.resize(depth);
  tape.output_shapes_.resize(depth);

  FeatureSet features;
  Tensor current = image;
  for (std::size_t i = 0; i < depth; ++i) {
    const LayerSpec& layer = topology[i];
    switch (layer.kind) {
      case LayerKind::kConv: {
        const ConvParams& p = weights.at(layer.name);
        current = conv2d(current, p.weights, p.bias);
        break;
      }
      case LayerKind::kRelu: {
        Tensor out = relu(current);
        tape.saved_inputs_[i] = std::move(current);
        current = std::move(out);
        break;
      }
      case LayerKind::kPool: {
        Tensor out = pool2(current, layer.pool_mode);
        tape.saved_inputs_[i] = std::move(current);
        current = std::move(out);
        break;
      }
    }
    tape.output_shapes_[i] = current.shape();
    for (const auto& [name, index] : tape.captures_) {
      if (index == i) features[name] = current;
    }
  }
  return {std::move(features), std::move(tape)};
}

Tensor backprop_to_input(const Tape& tape, const FeatureSet& feature_grads) {
  if (tape.topology_ == nullptr) throw PreconditionError("backprop_to_input: empty tape");
  const NetworkTopology& topology = *tape.topology_;

  // Gradients injected at the output of layer i.
  std::vector<std::vector<const Tensor*>> by_layer(tape.depth_);
  for (const auto& [name, grad] : feature_grads) {
    const auto it = tape.captures_.find(name);
    if (it == tape.captures_.end()) {
      throw CaptureError("gradient supplied for layer '" + name + "' which was not captured");
    }
    const Shape& expected = tape.output_shapes_[it->second];
    if (grad.shape() != expected) {
      throw ShapeError("gradient for '" + name + "' has shape " + shape_to_string(grad.shape()) +
                       ", feature is " + shape_to_string(expected));
    }
    by_layer[it->second].push_back(&grad);
  }

  std::optional<Tensor> grad;
  for (std::size_t i = tape.depth_; i-- > 0;) {
    for (const Tensor* g : by_layer[i]) {
      if (!grad) {
        grad = *g;
      } else {
        *grad = axpy(1.0, *g, *grad);
      }
    }
    if (!grad) continue;
    const LayerSpec& layer = topology[i];
    switch (layer.kind) {
      case LayerKind::kConv:
        grad = conv2d_backward_input(*grad, tape.weights_->at(layer.name).weights);
        break;
      case LayerKind::kRelu:
        grad = relu_backward(*grad, tape.saved_inputs_[i]);
        break;
      case LayerKind::kPool:
        grad = pool2_backward(*grad, tape.saved_inputs_[i], layer.pool_mode);
        break;
    }
  }
  if (!grad) return Tensor(tape.input_shape_, 0.0);
  return std::move(*grad);
}

}  // namespace chromabrush
