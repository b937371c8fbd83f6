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
#include <cstring>

#include "chromabrush/convnet.hpp"
#include "chromabrush/error.hpp"
#include "chromabrush/kernels.hpp"

namespace chromabrush {
namespace {

// Upper bound on patch-matrix elements per band (32 MiB of doubles).
constexpr std::size_t kBandBudget = std::size_t{4} << 20;

void require_chw(const Tensor& t, const char* what) {
  if (t.rank() != 3) {
    throw ShapeError(std::string(what) + ": expected C x H x W tensor, got " +
                     shape_to_string(t.shape()));
  }
}

void check_conv_weights(const Tensor& weights, std::size_t in_channels, const char* what) {
  if (weights.rank() != 4 || weights.extent(2) != 3 || weights.extent(3) != 3 ||
      weights.extent(1) != in_channels) {
    throw ShapeError(std::string(what) + ": weights " + shape_to_string(weights.shape()) +
                     " do not match " + std::to_string(in_channels) + " input channels");
  }
}

std::size_t rows_per_band(std::size_t k, std::size_t width, std::size_t height) {
  const std::size_t per_row = std::max<std::size_t>(1, k * width);
  return std::clamp<std::size_t>(kBandBudget / per_row, 1, height);
}

Shape pooled_shape(const Shape& s) { return {s[0], (s[1] + 1) / 2, (s[2] + 1) / 2}; }

}  // namespace

Tensor im2col3x3(const Tensor& input, std::size_t y0, std::size_t y1) {
  require_chw(input, "im2col3x3");
  const std::size_t channels = input.extent(0), height = input.extent(1), width = input.extent(2);
  if (y0 >= y1 || y1 > height) throw ShapeError("im2col3x3: invalid row band");
  const std::size_t cols = (y1 - y0) * width;
  Tensor out({channels * 9, cols}, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t dy = 0; dy < 3; ++dy) {
      for (std::size_t dx = 0; dx < 3; ++dx) {
        double* row = out.data().data() + ((c * 9) + dy * 3 + dx) * cols;
        for (std::size_t y = y0; y < y1; ++y) {
          const auto sy = static_cast<std::ptrdiff_t>(y + dy) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(height)) continue;
          const double* src =
              input.data().data() + (c * height + static_cast<std::size_t>(sy)) * width;
          double* dst = row + (y - y0) * width;
          // dst[x] = src[x + dx - 1], zero outside [0, width).
          const std::size_t x_begin = dx == 0 ? 1 : 0;
          const std::size_t x_end = dx == 2 ? width - 1 : width;
          for (std::size_t x = x_begin; x < x_end; ++x) dst[x] = src[x + dx - 1];
        }
      }
    }
  }
  return out;
}

void col2im3x3(const Tensor& cols, std::size_t y0, std::size_t y1, Tensor& grad_input) {
  require_chw(grad_input, "col2im3x3");
  const std::size_t channels = grad_input.extent(0), height = grad_input.extent(1),
                    width = grad_input.extent(2);
  const std::size_t ncols = (y1 - y0) * width;
  if (cols.shape() != Shape{channels * 9, ncols}) throw ShapeError("col2im3x3: patch matrix shape");
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t dy = 0; dy < 3; ++dy) {
      for (std::size_t dx = 0; dx < 3; ++dx) {
        const double* row = cols.data().data() + ((c * 9) + dy * 3 + dx) * ncols;
        for (std::size_t y = y0; y < y1; ++y) {
          const auto sy = static_cast<std::ptrdiff_t>(y + dy) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(height)) continue;
          double* dst = &grad_input.at(c, static_cast<std::size_t>(sy), 0);
          const double* src = row + (y - y0) * width;
          const std::size_t x_begin = dx == 0 ? 1 : 0;
          const std::size_t x_end = dx == 2 ? width - 1 : width;
          for (std::size_t x = x_begin; x < x_end; ++x) dst[x + dx - 1] += src[x];
        }
      }
    }
  }
}

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require_chw(input, "conv2d");
  const std::size_t in_c = input.extent(0), height = input.extent(1), width = input.extent(2);
  check_conv_weights(weights, in_c, "conv2d");
  const std::size_t out_c = weights.extent(0);
  if (bias.shape() != Shape{out_c}) {
    throw ShapeError("conv2d: bias " + shape_to_string(bias.shape()) + " for " +
                     std::to_string(out_c) + " output channels");
  }
  const std::size_t k = in_c * 9;
  const std::size_t hw = height * width;
  Tensor out({out_c, height, width});
  const std::size_t band = rows_per_band(k, width, height);

  std::vector<double> scratch;
  for (std::size_t y0 = 0; y0 < height; y0 += band) {
    const std::size_t y1 = std::min(height, y0 + band);
    const std::size_t n = (y1 - y0) * width;
    const Tensor cols = im2col3x3(input, y0, y1);
    const bool whole = (n == hw);
    double* dst = out.data().data();
    if (!whole) {
      scratch.assign(out_c * n, 0.0);
      dst = scratch.data();
    }
    for (std::size_t o = 0; o < out_c; ++o) std::fill_n(dst + o * n, n, bias[o]);
    kernels::gemm(out_c, n, k, weights.data().data(), cols.data().data(), dst);
    if (!whole) {
      for (std::size_t o = 0; o < out_c; ++o) {
        std::memcpy(&out.at(o, y0, 0), dst + o * n, n * sizeof(double));
      }
    }
  }
  return out;
}

Tensor conv2d_backward_input(const Tensor& grad_out, const Tensor& weights) {
  require_chw(grad_out, "conv2d_backward_input");
  if (weights.rank() != 4 || weights.extent(0) != grad_out.extent(0) || weights.extent(2) != 3 ||
      weights.extent(3) != 3) {
    throw ShapeError("conv2d_backward_input: weights " + shape_to_string(weights.shape()) +
                     " incompatible with gradient " + shape_to_string(grad_out.shape()));
  }
  const std::size_t out_c = weights.extent(0), in_c = weights.extent(1);
  const std::size_t height = grad_out.extent(1), width = grad_out.extent(2);
  const std::size_t k = in_c * 9;
  const Tensor weights_t = transpose(weights.reshaped({out_c, k}));
  Tensor grad_in({in_c, height, width}, 0.0);
  const std::size_t band = rows_per_band(k, width, height);

  std::vector<double> gathered;
  for (std::size_t y0 = 0; y0 < height; y0 += band) {
    const std::size_t y1 = std::min(height, y0 + band);
    const std::size_t n = (y1 - y0) * width;
    const double* g = grad_out.data().data();
    if (n != height * width) {
      gathered.resize(out_c * n);
      for (std::size_t o = 0; o < out_c; ++o) {
        std::memcpy(gathered.data() + o * n, g + (o * height + y0) * width, n * sizeof(double));
      }
      g = gathered.data();
    }
    Tensor cols({k, n}, 0.0);
    kernels::gemm(k, n, out_c, weights_t.data().data(), g, cols.data().data());
    col2im3x3(cols, y0, y1, grad_in);
  }
  return grad_in;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& forward_input) {
  require_same_shape(grad_out, forward_input, "relu_backward");
  Tensor out = grad_out;
  const auto x = forward_input.data();
  auto g = out.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(x[i] > 0.0)) g[i] = 0.0;
  }
  return out;
}

Tensor pool2(const Tensor& input, PoolMode mode) {
  require_chw(input, "pool2");
  const std::size_t channels = input.extent(0), height = input.extent(1), width = input.extent(2);
  Tensor out(pooled_shape(input.shape()));
  const std::size_t oh = out.extent(1), ow = out.extent(2);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const std::size_t ylim = std::min(height, 2 * oy + 2);
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t xlim = std::min(width, 2 * ox + 2);
        double acc = mode == PoolMode::kMax ? input.at(c, 2 * oy, 2 * ox) : 0.0;
        std::size_t count = 0;
        for (std::size_t y = 2 * oy; y < ylim; ++y) {
          for (std::size_t x = 2 * ox; x < xlim; ++x) {
            const double v = input.at(c, y, x);
            if (mode == PoolMode::kMax) {
              if (v > acc) acc = v;
            } else {
              acc += v;
            }
            ++count;
          }
        }
        out.at(c, oy, ox) = mode == PoolMode::kMax ? acc : acc / static_cast<double>(count);
      }
    }
  }
  return out;
}

Tensor pool2_backward(const Tensor& grad_out, const Tensor& forward_input, PoolMode mode) {
  require_chw(forward_input, "pool2_backward");
  if (grad_out.shape() != pooled_shape(forward_input.shape())) {
    throw ShapeError("pool2_backward: gradient " + shape_to_string(grad_out.shape()) +
                     " does not match pooled " + shape_to_string(forward_input.shape()));
  }
  const std::size_t channels = forward_input.extent(0), height = forward_input.extent(1),
                    width = forward_input.extent(2);
  Tensor grad_in(forward_input.shape(), 0.0);
  const std::size_t oh = grad_out.extent(1), ow = grad_out.extent(2);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const std::size_t ylim = std::min(height, 2 * oy + 2);
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t xlim = std::min(width, 2 * ox + 2);
        const double g = grad_out.at(c, oy, ox);
        if (mode == PoolMode::kMax) {
          std::size_t by = 2 * oy, bx = 2 * ox;
          double best = forward_input.at(c, by, bx);
          for (std::size_t y = 2 * oy; y < ylim; ++y) {
            for (std::size_t x = 2 * ox; x < xlim; ++x) {
              if (forward_input.at(c, y, x) > best) {
                best = forward_input.at(c, y, x);
                by = y;
                bx = x;
              }
            }
          }
          grad_in.at(c, by, bx) += g;
        } else {
          const double share =
              g / static_cast<double>((ylim - 2 * oy) * (xlim - 2 * ox));
          for (std::size_t y = 2 * oy; y < ylim; ++y)
            for (std::size_t x = 2 * ox; x < xlim; ++x) grad_in.at(c, y, x) += share;
        }
      }
    }
  }
  return grad_in;
}

}  // namespace chromabrush
