// Copyright 2026 The PDL Authors. All Rights Reserved.
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

#ifndef PDL_IMAGE_HPP_
#define PDL_IMAGE_HPP_

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdl/errors.hpp"

namespace pdl {

namespace detail {

inline void check_image_shape(int width, int height, int channels) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image dimensions must be positive");
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("image channel count must be 1 or 3");
  if (static_cast<long long>(width) * height > (1ll << 26))
    throw std::invalid_argument("image dimensions exceed the supported size");
}

}  // namespace detail

// Raster held as doubles in [0, 1], row-major with interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;

  Image() = default;

  Image(int width, int height, int channels)
      : width(width), height(height), channels(channels) {
    detail::check_image_shape(width, height, channels);
    data.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
  }

  static Image from_data(int width, int height, int channels,
                         std::vector<double> values) {
    detail::check_image_shape(width, height, channels);
    std::size_t expected =
        static_cast<std::size_t>(width) * height * channels;
    if (values.size() != expected)
      throw std::invalid_argument("image payload size does not match shape");
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("image values must lie in [0, 1]");
    }
    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.data = std::move(values);
    return img;
  }

  std::size_t size() const { return data.size(); }

  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

namespace detail {

// Reads one decimal header field, skipping whitespace and '#' comments.
inline int pnm_header_int(std::istream& in, const char* what) {
  int ch = in.get();
  for (;;) {
    if (ch == EOF)
      throw format_error(std::string("missing ") + what + " in header");
    if (ch == '#') {
      while (ch != '\n' && ch != EOF) ch = in.get();
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(ch))) break;
    ch = in.get();
  }
  if (!std::isdigit(static_cast<unsigned char>(ch)))
    throw format_error(std::string("malformed ") + what + " in header");
  long value = 0;
  while (std::isdigit(static_cast<unsigned char>(ch))) {
    value = value * 10 + (ch - '0');
    if (value > 1000000000)
      throw format_error(std::string("oversized ") + what + " in header");
    ch = in.get();
  }
  if (ch != EOF) in.unget();
  return static_cast<int>(value);
}

}  // namespace detail

// Reads a binary PGM (P5) or PPM (P6) file with maxval 255.
inline Image image_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' ||
      (magic[1] != '5' && magic[1] != '6'))
    throw format_error(path + ": not a binary PGM or PPM file");
  int channels = magic[1] == '5' ? 1 : 3;

  int width = detail::pnm_header_int(in, "width");
  int height = detail::pnm_header_int(in, "height");
  int maxval = detail::pnm_header_int(in, "maxval");
  try {
    detail::check_image_shape(width, height, channels);
  } catch (const std::invalid_argument& e) {
    throw format_error(path + ": " + e.what());
  }
  if (maxval != 255)
    throw format_error(path + ": unsupported maxval " + std::to_string(maxval));
  int sep = in.get();
  if (sep == EOF || !std::isspace(static_cast<unsigned char>(sep)))
    throw format_error(path + ": missing separator before payload");

  std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<unsigned char> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw format_error(path + ": short payload");
  if (in.get() != EOF) throw format_error(path + ": trailing data");

  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) img.data[i] = bytes[i] / 255.0;
  return img;
}

// Writes a binary PGM (1 channel) or PPM (3 channels) with maxval 255.
// Values quantize to round(v * 255).
inline void image_write(const Image& img, const std::string& path) {
  detail::check_image_shape(img.width, img.height, img.channels);
  if (img.data.size() !=
      static_cast<std::size_t>(img.width) * img.height * img.channels)
    throw std::invalid_argument("image payload size does not match shape");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    double v = img.data[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("image values must lie in [0, 1]");
    bytes[i] = static_cast<unsigned char>(std::llround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw io_error("write failed for " + path);
}

}  // namespace pdl

#endif  // PDL_IMAGE_HPP_
