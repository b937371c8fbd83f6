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

#include <bit>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <zlib.h>

#include "chromabrush/cli.hpp"
#include "chromabrush/convnet.hpp"

namespace chromabrush::cli {
namespace {

Shape to_shape(const RawTensor& t) { return Shape(t.extents.begin(), t.extents.end()); }

uLong crc_floats(uLong crc, const std::vector<float>& values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
}

}  // namespace

std::vector<WeightReportRow> check_weights(const std::filesystem::path& path) {
  const std::vector<RawLayer> layers = read_vggw(path);
  const NetworkTopology topology = vgg19_topology(PoolMode::kAvg);
  to_weight_store(layers, topology).validate(topology);

  std::vector<WeightReportRow> rows;
  for (const LayerSpec* spec : topology.conv_layers()) {
    const std::string& name = spec->name;
    for (const RawLayer& layer : layers) {
      if (layer.name != name) continue;
      uLong crc = crc32(0L, Z_NULL, 0);
      crc = crc_floats(crc, layer.tensors[0].values);
      crc = crc_floats(crc, layer.tensors[1].values);
      rows.push_back({name, to_shape(layer.tensors[0]), to_shape(layer.tensors[1]),
                      static_cast<std::uint32_t>(crc)});
    }
  }
  return rows;
}

std::string format_weight_report(const std::vector<WeightReportRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s  %-18s  %-8s  %s\n", "layer", "weights", "bias", "crc32");
  os << buf;
  for (const WeightReportRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-8s  %-18s  %-8s  %08x\n", r.name.c_str(),
                  shape_to_string(r.weight_shape).c_str(), shape_to_string(r.bias_shape).c_str(),
                  static_cast<unsigned>(r.crc32));
    os << buf;
  }
  os << rows.size() << " conv layers OK\n";
  return os.str();
}

}  // namespace chromabrush::cli
