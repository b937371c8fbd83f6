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
#include <cmath>
#include <cstring>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {
namespace {

cv::Mat as_mat(const ByteImage& image) {
  return cv::Mat(static_cast<int>(image.height), static_cast<int>(image.width), CV_8UC3,
                 const_cast<std::uint8_t*>(image.rgb.data()));
}

ByteImage from_mat_rgb(const cv::Mat& rgb) {
  ByteImage out;
  out.height = static_cast<std::size_t>(rgb.rows);
  out.width = static_cast<std::size_t>(rgb.cols);
  out.rgb.resize(out.height * out.width * 3);
  const cv::Mat packed = rgb.isContinuous() ? rgb : rgb.clone();
  std::memcpy(out.rgb.data(), packed.data, out.rgb.size());
  return out;
}

}  // namespace

ByteImage read_image(const std::filesystem::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw DecodeError("cannot decode image '" + path.string() + "': " + e.what());
  }
  if (bgr.empty()) throw DecodeError("cannot read or decode image '" + path.string() + "'");
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return from_mat_rgb(rgb);
}

void write_png(const std::filesystem::path& path, const ByteImage& image) {
  cv::Mat bgr;
  cv::cvtColor(as_mat(image), bgr, cv::COLOR_RGB2BGR);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    throw IoError("cannot write '" + path.string() + "': " + e.what());
  }
  if (!ok) throw IoError("cannot write '" + path.string() + "'");
}

ByteImage to_grayscale(const ByteImage& image) {
  cv::Mat gray;
  cv::cvtColor(as_mat(image), gray, cv::COLOR_RGB2GRAY);
  cv::Mat rgb;
  cv::cvtColor(gray, rgb, cv::COLOR_GRAY2RGB);
  return from_mat_rgb(rgb);
}

ImageBuffer preprocess_image(const ByteImage& image, std::size_t max_side, bool force_grayscale,
                             Provenance provenance) {
  if (image.height == 0 || image.width == 0) throw DecodeError("empty image");
  ByteImage src = force_grayscale ? to_grayscale(image) : image;

  const std::size_t longer = std::max(src.height, src.width);
  if (max_side > 0 && longer > max_side) {
    const double scale = static_cast<double>(max_side) / static_cast<double>(longer);
    const auto scaled = [&](std::size_t side) {
      return side == longer ? max_side
                            : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side * scale)));
    };
    cv::Mat resized;
    cv::resize(as_mat(src), resized,
               cv::Size(static_cast<int>(scaled(src.width)), static_cast<int>(scaled(src.height))), 0, 0,
               cv::INTER_CUBIC);
    src = from_mat_rgb(resized);
  }
  if (src.height < kMinImageSide || src.width < kMinImageSide) {
    throw SizeError("image is " + std::to_string(src.width) + "x" + std::to_string(src.height) +
                    " after resizing; at least " + std::to_string(kMinImageSide) + "x" +
                    std::to_string(kMinImageSide) + " is required");
  }

  ImageBuffer out;
  out.original_height = image.height;
  out.original_width = image.width;
  out.provenance = provenance;
  out.pixels = Tensor({3, src.height, src.width});
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        // BGR plane c takes RGB channel 2 - c.
        out.pixels.at(c, y, x) = static_cast<double>(src.at(y, x, 2 - c)) - kBgrMeans[c];
      }
    }
  }
  return out;
}

ImageBuffer preprocess(const std::filesystem::path& path, std::size_t max_side,
                       bool force_grayscale, Provenance provenance) {
  return preprocess_image(read_image(path), max_side, force_grayscale, provenance);
}

ByteImage deprocess(const ImageBuffer& image) {
  ByteImage out;
  out.height = image.height();
  out.width = image.width();
  out.rgb.resize(out.height * out.width * 3);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        double v = image.pixels.at(c, y, x) + kBgrMeans[c];
        if (std::isnan(v)) v = 0.0;
        // nearbyint under the default rounding mode rounds half to even.
        v = std::nearbyint(std::clamp(v, 0.0, 255.0));
        out.at(y, x, 2 - c) = static_cast<std::uint8_t>(v);
      }
    }
  }
  return out;
}

ImageBuffer resize_buffer(const ImageBuffer& image, std::size_t height, std::size_t width) {
  if (image.height() == height && image.width() == width) return image;
  ImageBuffer out = image;
  out.pixels = Tensor({3, height, width});
  const std::size_t src_plane = image.height() * image.width();
  for (std::size_t c = 0; c < 3; ++c) {
    const cv::Mat plane(static_cast<int>(image.height()), static_cast<int>(image.width()), CV_64F,
                        const_cast<double*>(image.pixels.data().data() + c * src_plane));
    cv::Mat resized;
    cv::resize(plane, resized, cv::Size(static_cast<int>(width), static_cast<int>(height)), 0, 0,
               cv::INTER_CUBIC);
    std::memcpy(&out.pixels.at(c, 0, 0), resized.ptr<double>(), height * width * sizeof(double));
  }
  return out;
}

}  // namespace chromabrush
