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
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

#include "chromabrush/convnet.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {
namespace {

constexpr char kMagic[4] = {'V', 'G', 'G', 'W'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxRank = 8;

// Little-endian cursor over the file image; every read checks bounds and
// reports the offset at which the data ran out.
class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  void need(std::size_t n, const std::string& what) const {
    if (bytes_.size() - pos_ < n) {
      throw TruncationError("weight file truncated at byte offset " + std::to_string(pos_) +
                                " while reading " + what + " (needed " + std::to_string(n) +
                                " bytes, " + std::to_string(bytes_.size() - pos_) + " left)",
                            pos_);
    }
  }

  std::uint64_t uint(std::size_t width, const std::string& what) {
    need(width, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += width;
    return v;
  }

  float f32(const std::string& what) {
    const auto bits = static_cast<std::uint32_t>(uint(4, what));
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::string text(std::size_t n, const std::string& what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  void uint(std::uint64_t v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    uint(bits, 4);
  }
  void text(const std::string& s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<unsigned char> take() { return std::move(bytes_); }

 private:
  std::vector<unsigned char> bytes_;
};

Shape expected_weight_shape(const LayerSpec& layer) {
  return {layer.out_channels, layer.in_channels, 3, 3};
}

Shape to_shape(const std::vector<std::uint32_t>& extents) {
  return Shape(extents.begin(), extents.end());
}

}  // namespace

void WeightStore::set(const std::string& layer, ConvParams params) {
  entries_[layer] = std::move(params);
}

const ConvParams& WeightStore::at(const std::string& layer) const {
  const auto it = entries_.find(layer);
  if (it == entries_.end()) throw TopologyError("no weights for layer '" + layer + "'");
  return it->second;
}

void WeightStore::validate(const NetworkTopology& topology) const {
  std::set<std::string> expected;
  for (const LayerSpec* layer : topology.conv_layers()) {
    expected.insert(layer->name);
    const auto it = entries_.find(layer->name);
    if (it == entries_.end()) throw TopologyError("missing weights for layer '" + layer->name + "'");
    const ConvParams& p = it->second;
    if (p.weights.shape() != expected_weight_shape(*layer) ||
        p.bias.shape() != Shape{layer->out_channels}) {
      throw TopologyError("layer '" + layer->name + "' has weights " +
                          shape_to_string(p.weights.shape()) + " / bias " +
                          shape_to_string(p.bias.shape()) + ", topology expects " +
                          shape_to_string(expected_weight_shape(*layer)) + " / [" +
                          std::to_string(layer->out_channels) + "]");
    }
    if (!p.weights.all_finite() || !p.bias.all_finite()) {
      throw CorruptionError("layer '" + layer->name + "' contains non-finite values");
    }
  }
  for (const auto& [name, params] : entries_) {
    if (!expected.count(name)) throw TopologyError("weights for unknown layer '" + name + "'");
  }
}

std::vector<RawLayer> parse_vggw(const std::vector<unsigned char>& bytes) {
  Reader in(bytes);
  const std::string magic = in.text(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic: expected \"VGGW\"");
  }
  const auto version = in.uint(4, "version");
  if (version != kVersion) {
    throw FormatError("unsupported VGGW version " + std::to_string(version) + " (expected 1)");
  }
  const auto layer_count = in.uint(4, "layer count");

  std::vector<RawLayer> layers;
  std::set<std::string> names;
  for (std::uint64_t l = 0; l < layer_count; ++l) {
    RawLayer layer;
    layer.offset = in.offset();
    const auto name_len = in.uint(2, "layer name length");
    layer.name = in.text(name_len, "layer name");
    if (layer.name.empty()) throw FormatError("empty layer name at byte offset " + std::to_string(layer.offset));
    if (!names.insert(layer.name).second) throw FormatError("duplicate layer '" + layer.name + "'");
    const auto tensor_count = in.uint(1, "tensor count of '" + layer.name + "'");
    if (tensor_count != 2) {
      throw FormatError("layer '" + layer.name + "' declares " + std::to_string(tensor_count) +
                        " tensors (expected 2: weights, bias)");
    }
    for (std::uint64_t t = 0; t < tensor_count; ++t) {
      const std::string what = "layer '" + layer.name + (t == 0 ? "' weights" : "' bias");
      RawTensor tensor;
      const auto ndim = in.uint(4, what + " rank");
      if (ndim == 0 || ndim > kMaxRank) {
        throw FormatError(what + " has unsupported rank " + std::to_string(ndim));
      }
      std::uint64_t count = 1;
      for (std::uint64_t d = 0; d < ndim; ++d) {
        const auto e = static_cast<std::uint32_t>(in.uint(4, what + " extents"));
        if (e == 0) throw FormatError(what + " has a zero extent");
        tensor.extents.push_back(e);
        count *= e;
        if (count > bytes.size()) in.need(count * 4, what + " values");
      }
      in.need(count * 4, what + " values");
      tensor.values.resize(count);
      for (auto& v : tensor.values) {
        v = in.f32(what);
        if (!std::isfinite(v)) {
          throw CorruptionError(what + " contains a non-finite value at byte offset " +
                                std::to_string(in.offset() - 4));
        }
      }
      layer.tensors.push_back(std::move(tensor));
    }
    layers.push_back(std::move(layer));
  }
  if (!in.at_end()) {
    throw FormatError("unexpected trailing data at byte offset " + std::to_string(in.offset()));
  }
  return layers;
}

std::vector<RawLayer> read_vggw(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open weight file '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  return parse_vggw(bytes);
}

WeightStore to_weight_store(const std::vector<RawLayer>& layers, const NetworkTopology& topology) {
  std::map<std::string, const RawLayer*> by_name;
  for (const RawLayer& layer : layers) by_name[layer.name] = &layer;

  WeightStore store;
  for (const LayerSpec* spec : topology.conv_layers()) {
    const auto it = by_name.find(spec->name);
    if (it == by_name.end()) throw TopologyError("weight file is missing layer '" + spec->name + "'");
    const RawLayer& raw = *it->second;
    const Shape w_shape = to_shape(raw.tensors[0].extents);
    const Shape b_shape = to_shape(raw.tensors[1].extents);
    if (w_shape != expected_weight_shape(*spec) || b_shape != Shape{spec->out_channels}) {
      throw TopologyError("layer '" + spec->name + "' has weights " + shape_to_string(w_shape) +
                          " / bias " + shape_to_string(b_shape) + ", topology expects " +
                          shape_to_string(expected_weight_shape(*spec)) + " / [" +
                          std::to_string(spec->out_channels) + "]");
    }
    const auto widen = [](const RawTensor& t) {
      return std::vector<double>(t.values.begin(), t.values.end());
    };
    store.set(spec->name, ConvParams{Tensor(w_shape, widen(raw.tensors[0])),
                                     Tensor(b_shape, widen(raw.tensors[1]))});
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    throw TopologyError("weight file has layer '" + by_name.begin()->first +
                        "' that the topology does not contain");
  }
  return store;
}

WeightStore load_weights(const std::filesystem::path& path, const NetworkTopology& topology) {
  return to_weight_store(read_vggw(path), topology);
}

std::vector<unsigned char> serialize_vggw(const WeightStore& store,
                                          const NetworkTopology& topology) {
  const auto convs = topology.conv_layers();
  Writer out;
  out.text(std::string(kMagic, 4));
  out.uint(kVersion, 4);
  out.uint(convs.size(), 4);
  for (const LayerSpec* spec : convs) {
    const ConvParams& p = store.at(spec->name);
    out.uint(spec->name.size(), 2);
    out.text(spec->name);
    out.uint(2, 1);
    for (const Tensor* t : {&p.weights, &p.bias}) {
      out.uint(t->rank(), 4);
      for (std::size_t e : t->shape()) out.uint(e, 4);
      for (double v : t->data()) out.f32(static_cast<float>(v));
    }
  }
  return out.take();
}

void save_weights(const std::filesystem::path& path, const WeightStore& store,
                  const NetworkTopology& topology) {
  const auto bytes = serialize_vggw(store, topology);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write weight file '" + path.string() + "'");
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("short write to '" + path.string() + "'");
}

WeightStore random_weights(const NetworkTopology& topology, std::uint64_t seed, double gain) {
  std::mt19937_64 rng(seed);
  WeightStore store;
  for (const LayerSpec* spec : topology.conv_layers()) {
    const double fan_in = static_cast<double>(spec->in_channels * 9);
    std::normal_distribution<double> w_dist(0.0, gain * std::sqrt(2.0 / fan_in));
    std::uniform_real_distribution<double> b_dist(-0.05, 0.05);
    Tensor w(expected_weight_shape(*spec));
    Tensor b({spec->out_channels});
    // Round through f32 so a save/load round trip is exact.
    for (double& v : w.data()) v = static_cast<float>(w_dist(rng));
    for (double& v : b.data()) v = static_cast<float>(b_dist(rng));
    store.set(spec->name, ConvParams{std::move(w), std::move(b)});
  }
  return store;
}

}  // namespace chromabrush
