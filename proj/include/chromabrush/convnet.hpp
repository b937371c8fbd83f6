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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chromabrush/tensor.hpp"

namespace chromabrush {

enum class LayerKind { kConv, kRelu, kPool };
enum class PoolMode { kMax, kAvg };

// Convolutions are always 3x3 / stride 1 / pad 1; pools are 2x2 / stride 2.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kConv;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  PoolMode pool_mode = PoolMode::kAvg;
};

class NetworkTopology {
 public:
  NetworkTopology() = default;
  // Throws ConfigError on duplicate names, broken channel chaining, or a
  // relu/pool whose channel counts differ from its input.
  explicit NetworkTopology(std::vector<LayerSpec> layers);

  // Blocks of 3x3 convs, each conv followed by relu, pools between blocks
  // (and after the last block when trailing_pool is set). Layers are named
  // conv{b}_{i}, relu{b}_{i}, pool{b} with 1-based indices.
  static NetworkTopology from_blocks(std::size_t in_channels,
                                     const std::vector<std::vector<std::size_t>>& blocks,
                                     PoolMode mode, bool trailing_pool = true);

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const LayerSpec& operator[](std::size_t i) const { return layers_[i]; }

  std::optional<std::size_t> index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name).has_value(); }

  // Index of the layer whose output represents `name` as a feature: a conv
  // immediately followed by relu resolves to the relu (post-activation).
  // Throws CaptureError for unknown names.
  std::size_t capture_index(const std::string& name) const;
  std::size_t capture_channels(const std::string& name) const;

  std::vector<const LayerSpec*> conv_layers() const;
  std::size_t input_channels() const;

 private:
  std::vector<LayerSpec> layers_;
};

// VGG-19 convolutional trunk: 16 convs, interleaved relus, 5 pools.
NetworkTopology vgg19_topology(PoolMode mode = PoolMode::kAvg);

// Same layers with every pool switched to `mode`.
NetworkTopology with_pooling(const NetworkTopology& topology, PoolMode mode);

struct ConvParams {
  Tensor weights;  // out x in x 3 x 3
  Tensor bias;     // out
};

class WeightStore {
 public:
  WeightStore() = default;

  void set(const std::string& layer, ConvParams params);
  const ConvParams& at(const std::string& layer) const;
  bool contains(const std::string& layer) const { return entries_.count(layer) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, ConvParams>& entries() const noexcept { return entries_; }

  // Throws TopologyError on missing/extra/misshapen layers and
  // CorruptionError on non-finite values.
  void validate(const NetworkTopology& topology) const;

 private:
  std::map<std::string, ConvParams> entries_;
};

// One layer record as stored on disk, before widening to double.
struct RawTensor {
  std::vector<std::uint32_t> extents;
  std::vector<float> values;
};
struct RawLayer {
  std::string name;
  std::vector<RawTensor> tensors;
  std::size_t offset = 0;  // byte offset of the layer record
};

// Parses the VGGW container without reference to any topology. Throws
// FormatError (bad magic/version/framing), TruncationError (with byte
// offset) or CorruptionError (non-finite value).
std::vector<RawLayer> parse_vggw(const std::vector<unsigned char>& bytes);
std::vector<RawLayer> read_vggw(const std::filesystem::path& path);

// Matches parsed layers against the topology and widens to double.
WeightStore to_weight_store(const std::vector<RawLayer>& layers, const NetworkTopology& topology);
WeightStore load_weights(const std::filesystem::path& path, const NetworkTopology& topology);

// Writes conv layers in topology order. Values are narrowed to f32.
std::vector<unsigned char> serialize_vggw(const WeightStore& store,
                                          const NetworkTopology& topology);
void save_weights(const std::filesystem::path& path, const WeightStore& store,
                  const NetworkTopology& topology);

// Deterministic He-style random weights for stand-in networks.
WeightStore random_weights(const NetworkTopology& topology, std::uint64_t seed,
                           double gain = 1.0);

// --- single-layer operations -------------------------------------------------

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias);
// Adjoint of conv2d with respect to its input (bias has no input effect).
Tensor conv2d_backward_input(const Tensor& grad_out, const Tensor& weights);

Tensor relu(const Tensor& input);
// Gradient passes where the forward input was > 0.
Tensor relu_backward(const Tensor& grad_out, const Tensor& forward_input);

// 2x2 / stride-2 pooling. Odd trailing windows use only their available
// cells (avg divides by the real cell count).
Tensor pool2(const Tensor& input, PoolMode mode);
// Max routes to the first maximal cell in row-major window order.
Tensor pool2_backward(const Tensor& grad_out, const Tensor& forward_input, PoolMode mode);

// (C x H x W) -> (C*9 x rows*W) patch matrix for output rows [y0, y1).
Tensor im2col3x3(const Tensor& input, std::size_t y0, std::size_t y1);
// Accumulates a patch-matrix gradient back into `grad_input`.
void col2im3x3(const Tensor& cols, std::size_t y0, std::size_t y1, Tensor& grad_input);

// --- network passes ------------------------------------------------------------

using FeatureSet = std::map<std::string, Tensor>;

// Everything a backward pass needs from its forward pass. References the
// topology and weights it was created from; they must outlive the tape.
class Tape {
 public:
  const NetworkTopology& topology() const { return *topology_; }
  const Shape& input_shape() const noexcept { return input_shape_; }
  std::size_t depth() const noexcept { return depth_; }
  const std::map<std::string, std::size_t>& captures() const noexcept { return captures_; }

 private:
  friend std::pair<FeatureSet, Tape> forward_collect(const Tensor&, const NetworkTopology&,
                                                     const WeightStore&,
                                                     const std::set<std::string>&);
  friend Tensor backprop_to_input(const Tape&, const FeatureSet&);

  const NetworkTopology* topology_ = nullptr;
  const WeightStore* weights_ = nullptr;
  Shape input_shape_;
  std::size_t depth_ = 0;
  std::map<std::string, std::size_t> captures_;
  // Forward input of each executed relu/pool layer (empty for convs).
  std::vector<Tensor> saved_inputs_;
  std::vector<Shape> output_shapes_;
};

// Runs the network up to the deepest captured layer. Throws CaptureError for
// names the topology does not know, ShapeError on a channel mismatch.
std::pair<FeatureSet, Tape> forward_collect(const Tensor& image, const NetworkTopology& topology,
                                            const WeightStore& weights,
                                            const std::set<std::string>& capture);

// Chains caller-supplied dLoss/dFeature tensors back to the input image.
// Throws CaptureError for uncaptured keys, ShapeError on shape mismatch.
Tensor backprop_to_input(const Tape& tape, const FeatureSet& feature_grads);

}  // namespace chromabrush
