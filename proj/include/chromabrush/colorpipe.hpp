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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chromabrush/convnet.hpp"
#include "chromabrush/optim.hpp"
#include "chromabrush/styleloss.hpp"
#include "chromabrush/tensor.hpp"

namespace chromabrush {

// Per-channel means of the pretrained network's training set, in B, G, R
// order. Preprocessed pixels are (value - mean) with channels reordered.
inline constexpr std::array<double, 3> kBgrMeans{103.939, 116.779, 123.68};
inline constexpr std::size_t kMinImageSide = 16;

enum class InitMode { kNoise, kContent };
enum class Provenance { kContent, kStyle, kCanvas };

// 8-bit interleaved RGB.
struct ByteImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> rgb;

  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) { return rgb[(y * width + x) * 3 + c]; }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return rgb[(y * width + x) * 3 + c];
  }
  friend bool operator==(const ByteImage&, const ByteImage&) = default;
};

struct ImageBuffer {
  Tensor pixels;  // 3 x H x W, B/G/R, mean-subtracted
  std::size_t original_height = 0;
  std::size_t original_width = 0;
  Provenance provenance = Provenance::kContent;

  std::size_t height() const { return pixels.extent(1); }
  std::size_t width() const { return pixels.extent(2); }
};

// Decodes PNG/JPEG (DecodeError on failure). Single-channel sources are
// expanded to three identical channels.
ByteImage read_image(const std::filesystem::path& path);
// Throws IoError when the file cannot be written.
void write_png(const std::filesystem::path& path, const ByteImage& image);

// Luminance replicated into all three channels.
ByteImage to_grayscale(const ByteImage& image);

// Downscales (bicubic, aspect preserved) so the longer side is at most
// max_side, converts RGB -> mean-subtracted BGR. SizeError below 16x16.
ImageBuffer preprocess_image(const ByteImage& image, std::size_t max_side, bool force_grayscale,
                             Provenance provenance = Provenance::kContent);
ImageBuffer preprocess(const std::filesystem::path& path, std::size_t max_side,
                       bool force_grayscale, Provenance provenance = Provenance::kContent);

// Adds the means back, BGR -> RGB, clamps to [0, 255], rounds half-to-even.
ByteImage deprocess(const ImageBuffer& image);

// Bicubic resample of a preprocessed buffer.
ImageBuffer resize_buffer(const ImageBuffer& image, std::size_t height, std::size_t width);

// Which captured layers feed the loss, and their style weights.
struct LayerSelection {
  std::string content_layer;
  std::map<std::string, double> style_weights;

  // conv4_2 for content; conv1_1 ... conv5_1 at 1/5 each for style.
  static LayerSelection vgg19_default();
  std::set<std::string> capture_set() const;
};

struct NetworkBundle {
  NetworkTopology topology;
  WeightStore weights;
  LayerSelection layers;

  // Throws ConfigError if a selected layer is missing from the topology.
  void validate() const;
};

// beta(k) = beta0 * (1 - decay)^k, produced by repeated multiplication so
// consecutive values differ by exactly one rounding of the factor.
class StyleWeightSchedule {
 public:
  StyleWeightSchedule(double beta0, double decay_per_iter);

  double beta0() const noexcept { return beta0_; }
  double decay() const noexcept { return decay_; }
  double factor() const noexcept { return factor_; }
  double beta(std::size_t k) const;

 private:
  double beta0_;
  double decay_;
  double factor_;
};

struct RunConfig {
  std::filesystem::path content_path;
  std::filesystem::path style_path;
  std::filesystem::path output_path;
  std::size_t iterations = 1000;
  double alpha = 1.0;
  std::optional<double> beta0;  // defaults to 1e3 * alpha
  double decay_per_iter = 0.0025;
  optim::Method optimizer = optim::Method::kLbfgs;
  PoolMode pooling = PoolMode::kAvg;
  InitMode init = InitMode::kNoise;
  std::uint64_t seed = 0;
  std::size_t max_side = 512;
  double sgd_lr = 1.0;
  double sgd_momentum = 0.9;
  std::size_t history_reset_every = 0;
  bool grayscale_content = true;
  double noise_std = 30.0;

  double effective_beta0() const { return beta0 ? *beta0 : 1e3 * alpha; }
  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

// Frozen content features and style Grams. The style buffer is resampled to
// the content's size first when they differ.
LossTargets prepare_targets(const ImageBuffer& content, const ImageBuffer& style,
                            const NetworkBundle& network);

ImageBuffer initialize_canvas(const RunConfig& config, const ImageBuffer& content);

// Differentiable L_total(x) over flattened canvas pixels. beta is the only
// mutable knob (driven by the schedule).
class ColorizationObjective {
 public:
  ColorizationObjective(const NetworkBundle& network, LossTargets targets, double alpha,
                        double beta, Shape canvas_shape);

  void set_beta(double beta) noexcept { weights_.beta = beta; }
  double beta() const noexcept { return weights_.beta; }
  const LossTargets& targets() const noexcept { return targets_; }

  optim::Evaluation operator()(std::span<const double> x) const;

 private:
  const NetworkBundle* network_;
  LossTargets targets_;
  LossWeights weights_;
  Shape canvas_shape_;
  std::set<std::string> capture_;
};

struct TraceRow {
  std::size_t iter = 0;
  double beta = 0.0;
  double total = 0.0;
  double content = 0.0;
  double style = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct RunResult {
  ImageBuffer canvas;
  std::vector<TraceRow> trace;
  bool failed = false;
  std::string failure;
  // L_total at the returned canvas under the last iteration's beta.
  double final_loss = 0.0;
};

using ProgressCallback = std::function<void(const TraceRow&)>;

// In-memory run: schedule + optimizer over a prepared content/style pair.
RunResult colorize(const RunConfig& config, const NetworkBundle& network,
                   const ImageBuffer& content, const ImageBuffer& style,
                   const ProgressCallback& progress = {});
// Same, with targets already prepared (shared across runs).
RunResult colorize(const RunConfig& config, const NetworkBundle& network,
                   const ImageBuffer& content, const LossTargets& targets,
                   const ProgressCallback& progress = {});

// Reads images, runs, writes the PNG and its trace CSV. I/O failures throw.
RunResult run_colorization(const RunConfig& config, const NetworkBundle& network,
                           const ProgressCallback& progress = {});

std::filesystem::path trace_path_for(const std::filesystem::path& output);
// iter,beta,total,content,style,grad_norm,step with 9 significant digits.
std::string format_trace_csv(const std::vector<TraceRow>& trace);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

struct CompareRun {
  char panel = 'a';  // a: sgd fixed, b: sgd decay, c: lbfgs fixed, d: lbfgs decay
  optim::Method optimizer = optim::Method::kLbfgs;
  double decay = 0.0;
  double learning_rate = 0.0;  // sgd only
  RunResult result;
};

struct CompareResult {
  // Every run executed, grid points included, in execution order.
  std::vector<CompareRun> runs;
  // Index into `runs` of the run shown for each panel (best lr for SGD).
  std::map<char, std::size_t> panels;

  const CompareRun& panel(char p) const { return runs.at(panels.at(p)); }
};

// Learning rates tried for the SGD panels: sgd_lr * {1e-2, 1e-1, 1, 1e1, 1e2}.
std::vector<double> sgd_lr_grid(double sgd_lr);

// In-memory 2x2 {sgd, lbfgs} x {fixed, decaying} matrix with shared seed and
// targets. A failing run is recorded and the rest still execute.
CompareResult compare_optimizers(const RunConfig& config, const NetworkBundle& network,
                                 const ImageBuffer& content, const ImageBuffer& style);

// File-level wrapper: writes <stem>_a..d<ext> and <stem>_compare.csv.
CompareResult compare_optimizers(const RunConfig& config, const NetworkBundle& network);

std::filesystem::path panel_path_for(const std::filesystem::path& output, char panel);
std::filesystem::path compare_trace_path_for(const std::filesystem::path& output);
std::string format_compare_csv(const CompareResult& result);
void write_compare_csv(const std::filesystem::path& path, const CompareResult& result);

}  // namespace chromabrush
