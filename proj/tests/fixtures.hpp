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

// Shared test scaffolding built on the library: stand-in networks, scratch
// directories and synthetic images.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/convnet.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("chromabrush_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// conv1_1 -> relu -> conv1_2 -> relu. Content on conv1_2, style on both.
inline chromabrush::NetworkBundle two_conv_bundle(std::size_t width = 4, std::uint64_t seed = 1) {
  using namespace chromabrush;
  NetworkBundle b;
  b.topology = NetworkTopology::from_blocks(3, {{width, width}}, PoolMode::kAvg, false);
  b.weights = random_weights(b.topology, seed);
  b.layers.content_layer = "conv1_2";
  b.layers.style_weights = {{"conv1_1", 0.5}, {"conv1_2", 0.5}};
  return b;
}

// Four convs in two pooled blocks: a cheap stand-in for the VGG trunk.
inline chromabrush::NetworkBundle four_conv_bundle(std::uint64_t seed = 7,
                                                   chromabrush::PoolMode mode = chromabrush::PoolMode::kAvg) {
  using namespace chromabrush;
  NetworkBundle b;
  b.topology = NetworkTopology::from_blocks(3, {{8, 8}, {16, 16}}, mode, false);
  b.weights = random_weights(b.topology, seed);
  b.layers.content_layer = "conv2_2";
  for (const char* name : {"conv1_1", "conv1_2", "conv2_1", "conv2_2"}) {
    b.layers.style_weights[name] = 0.25;
  }
  return b;
}

// Smooth, seeded RGB pattern plus a little noise.
inline chromabrush::ByteImage pattern_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  chromabrush::ByteImage img{h, w, std::vector<std::uint8_t>(h * w * 3)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_int_distribution<int> jitter(-8, 8);
  const double p[3] = {phase(rng), phase(rng), phase(rng)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = 128.0 + 90.0 * std::sin(0.21 * (c + 1) * x + 0.13 * y + p[c]);
        img.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(v + jitter(rng), 0.0, 255.0));
      }
    }
  }
  return img;
}

inline chromabrush::ByteImage uniform_image(std::size_t h, std::size_t w, std::uint8_t r,
                                            std::uint8_t g, std::uint8_t b) {
  chromabrush::ByteImage img{h, w, std::vector<std::uint8_t>(h * w * 3)};
  for (std::size_t i = 0; i < h * w; ++i) {
    img.rgb[i * 3] = r;
    img.rgb[i * 3 + 1] = g;
    img.rgb[i * 3 + 2] = b;
  }
  return img;
}

}  // namespace fixtures
