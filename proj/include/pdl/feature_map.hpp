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

#ifndef PDL_FEATURE_MAP_HPP_
#define PDL_FEATURE_MAP_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdl/errors.hpp"

namespace pdl {

namespace detail {

inline void check_fmap_shape(std::uint32_t sites, std::uint32_t dims) {
  if (sites == 0 || dims == 0)
    throw std::invalid_argument("feature map must have sites and dims >= 1");
  if (static_cast<std::uint64_t>(sites) * dims > (1ull << 26))
    throw std::invalid_argument("feature map exceeds the supported size");
}

}  // namespace detail

// Set of feature vectors, one per spatial site, stored site-major as
// float32 (the on-disk payload precision). Arithmetic on features widens
// to double at the point of use.
struct FeatureMap {
  std::uint32_t sites = 0;
  std::uint32_t dims = 0;
  std::vector<float> values;

  FeatureMap() = default;

  FeatureMap(std::uint32_t sites, std::uint32_t dims)
      : sites(sites), dims(dims) {
    detail::check_fmap_shape(sites, dims);
    values.assign(static_cast<std::size_t>(sites) * dims, 0.0f);
  }

  static FeatureMap from_values(std::uint32_t sites, std::uint32_t dims,
                                std::vector<float> payload) {
    detail::check_fmap_shape(sites, dims);
    if (payload.size() != static_cast<std::size_t>(sites) * dims)
      throw std::invalid_argument(
          "feature payload size does not match shape");
    for (float v : payload) {
      if (!std::isfinite(v))
        throw std::invalid_argument("feature values must be finite");
    }
    FeatureMap m;
    m.sites = sites;
    m.dims = dims;
    m.values = std::move(payload);
    return m;
  }

  float at(std::uint32_t site, std::uint32_t dim) const {
    return values[static_cast<std::size_t>(site) * dims + dim];
  }
  float& at(std::uint32_t site, std::uint32_t dim) {
    return values[static_cast<std::size_t>(site) * dims + dim];
  }
};

namespace detail {

inline std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

inline void store_u32le(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

}  // namespace detail

inline constexpr std::uint32_t kFmapVersion = 1;

// Binary feature map file: magic "FMAP", then version, site count and
// dimension count as u32, then sites*dims float32 values site-major.
// All fields little-endian.
inline FeatureMap fmap_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failed for " + path);

  if (raw.size() < 16) throw format_error(path + ": truncated header");
  if (std::memcmp(raw.data(), "FMAP", 4) != 0)
    throw format_error(path + ": bad magic");
  std::uint32_t version = detail::load_u32le(raw.data() + 4);
  if (version != kFmapVersion)
    throw format_error(path + ": unsupported version " +
                       std::to_string(version));
  std::uint32_t sites = detail::load_u32le(raw.data() + 8);
  std::uint32_t dims = detail::load_u32le(raw.data() + 12);
  if (sites == 0 || dims == 0)
    throw format_error(path + ": sites and dims must be >= 1");
  std::uint64_t count = static_cast<std::uint64_t>(sites) * dims;
  if (count > (1ull << 26))
    throw format_error(path + ": header declares an oversized payload");
  if (raw.size() - 16 != count * 4)
    throw format_error(path + ": payload size does not match header");

  FeatureMap m;
  m.sites = sites;
  m.dims = dims;
  m.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t bits = detail::load_u32le(raw.data() + 16 + 4 * i);
    float v;
    std::memcpy(&v, &bits, 4);
    if (!std::isfinite(v))
      throw format_error(path + ": non-finite value in payload");
    m.values[i] = v;
  }
  return m;
}

inline void fmap_write(const FeatureMap& m, const std::string& path) {
  detail::check_fmap_shape(m.sites, m.dims);
  std::uint64_t count = static_cast<std::uint64_t>(m.sites) * m.dims;
  if (m.values.size() != count)
    throw std::invalid_argument("feature payload size does not match shape");

  std::vector<unsigned char> raw(16 + count * 4);
  std::memcpy(raw.data(), "FMAP", 4);
  detail::store_u32le(kFmapVersion, raw.data() + 4);
  detail::store_u32le(m.sites, raw.data() + 8);
  detail::store_u32le(m.dims, raw.data() + 12);
  for (std::uint64_t i = 0; i < count; ++i) {
    float v = m.values[i];
    if (!std::isfinite(v))
      throw std::invalid_argument("feature values must be finite");
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    detail::store_u32le(bits, raw.data() + 16 + 4 * i);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  out.flush();
  if (!out) throw io_error("write failed for " + path);
}

}  // namespace pdl

#endif  // PDL_FEATURE_MAP_HPP_
