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

#include <unordered_set>

#include "chromabrush/convnet.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {

NetworkTopology::NetworkTopology(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("network topology has no layers");
  std::unordered_set<std::string> seen;
  std::size_t channels = layers_.front().in_channels;
  if (channels == 0) throw ConfigError("first layer must declare its input channels");
  for (LayerSpec& layer : layers_) {
    if (layer.name.empty()) throw ConfigError("layer with empty name");
    if (!seen.insert(layer.name).second) throw ConfigError("duplicate layer name '" + layer.name + "'");
    if (layer.kind != LayerKind::kConv) {
      // relu and pool are channel-preserving; fill in counts when omitted.
      if (layer.in_channels == 0) layer.in_channels = channels;
      if (layer.out_channels == 0) layer.out_channels = layer.in_channels;
      if (layer.out_channels != layer.in_channels) {
        throw ConfigError("layer '" + layer.name + "' must preserve channel count");
      }
    }
    if (layer.in_channels != channels || layer.out_channels == 0) {
      throw ConfigError("layer '" + layer.name + "' expects " + std::to_string(layer.in_channels) +
                        " input channels but receives " + std::to_string(channels));
    }
    channels = layer.out_channels;
  }
}

NetworkTopology NetworkTopology::from_blocks(std::size_t in_channels,
                                             const std::vector<std::vector<std::size_t>>& blocks,
                                             PoolMode mode, bool trailing_pool) {
  std::vector<LayerSpec> layers;
  std::size_t channels = in_channels;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string block = std::to_string(b + 1);
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      const std::string suffix = block + "_" + std::to_string(i + 1);
      const std::size_t out = blocks[b][i];
      layers.push_back({"conv" + suffix, LayerKind::kConv, channels, out, mode});
      layers.push_back({"relu" + suffix, LayerKind::kRelu, out, out, mode});
      channels = out;
    }
    if (b + 1 < blocks.size() || trailing_pool) {
      layers.push_back({"pool" + block, LayerKind::kPool, channels, channels, mode});
    }
  }
  return NetworkTopology(std::move(layers));
}

std::optional<std::size_t> NetworkTopology::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t NetworkTopology::capture_index(const std::string& name) const {
  const auto idx = index_of(name);
  if (!idx) throw CaptureError("unknown capture layer '" + name + "'");
  if (layers_[*idx].kind == LayerKind::kConv && *idx + 1 < layers_.size() &&
      layers_[*idx + 1].kind == LayerKind::kRelu) {
    return *idx + 1;
  }
  return *idx;
}

std::size_t NetworkTopology::capture_channels(const std::string& name) const {
  return layers_[capture_index(name)].out_channels;
}

std::vector<const LayerSpec*> NetworkTopology::conv_layers() const {
  std::vector<const LayerSpec*> out;
  for (const LayerSpec& layer : layers_) {
    if (layer.kind == LayerKind::kConv) out.push_back(&layer);
  }
  return out;
}

std::size_t NetworkTopology::input_channels() const {
  return layers_.empty() ? 0 : layers_.front().in_channels;
}

NetworkTopology vgg19_topology(PoolMode mode) {
  return NetworkTopology::from_blocks(
      3, {{64, 64}, {128, 128}, {256, 256, 256, 256}, {512, 512, 512, 512}, {512, 512, 512, 512}},
      mode, /*trailing_pool=*/true);
}

NetworkTopology with_pooling(const NetworkTopology& topology, PoolMode mode) {
  std::vector<LayerSpec> layers = topology.layers();
  for (LayerSpec& layer : layers) layer.pool_mode = mode;
  return NetworkTopology(std::move(layers));
}

}  // namespace chromabrush
