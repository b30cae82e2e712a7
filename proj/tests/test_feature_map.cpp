// Copyright 2026 The PDL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pdl/feature_map.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include "gtest/gtest.h"
#include "pdl/errors.hpp"

namespace {

std::string TempPath(const std::string& name) {
  std::string dir = PDL_TEST_TMP;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return dir + "/" + name;
}

std::string ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void WriteBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  ASSERT_TRUE(out.good());
}

// A 1x1 map holding 2.5f pins down the byte layout end to end: magic,
// little-endian header words, then the IEEE bits of the payload.
TEST(FeatureMapFile, KnownByteLayout) {
  pdl::FeatureMap fm = pdl::FeatureMap::from_values(1, 1, {2.5f});
  const std::string path = TempPath("single.fmap");
  pdl::fmap_write(fm, path);
  std::string bytes = ReadBytes(path);
  ASSERT_EQ(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 4), "FMAP");
  const unsigned char expected[16] = {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0,
                                      0x00, 0x00, 0x20, 0x40};
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(static_cast<unsigned char>(bytes[4 + i]), expected[i]) << "offset " << 4 + i;
  }
}

TEST(FeatureMapFile, BitExactRoundTrip) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<float> dist(-100.0f, 100.0f);
  pdl::FeatureMap fm;
  fm.sites = 13;
  fm.dims = 5;
  fm.values.resize(static_cast<size_t>(fm.sites) * fm.dims);
  for (float& v : fm.values) v = dist(gen);
  const std::string path = TempPath("roundtrip.fmap");
  pdl::fmap_write(fm, path);
  pdl::FeatureMap back = pdl::fmap_read(path);
  EXPECT_EQ(back.sites, fm.sites);
  EXPECT_EQ(back.dims, fm.dims);
  ASSERT_EQ(back.values.size(), fm.values.size());
  EXPECT_EQ(std::memcmp(back.values.data(), fm.values.data(),
                        fm.values.size() * sizeof(float)),
            0);
}

TEST(FeatureMapFile, BadMagicRejected) {
  const std::string path = TempPath("badmagic.fmap");
  std::string bytes("FMAQ", 4);
  bytes += std::string(16, '\0');
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, BadVersionRejected) {
  pdl::FeatureMap fm = pdl::FeatureMap::from_values(1, 1, {0.0f});
  const std::string path = TempPath("badversion.fmap");
  pdl::fmap_write(fm, path);
  std::string bytes = ReadBytes(path);
  bytes[4] = 2;
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, PayloadSizeMismatchRejected) {
  pdl::FeatureMap fm = pdl::FeatureMap::from_values(2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  const std::string path = TempPath("badsize.fmap");
  pdl::fmap_write(fm, path);
  std::string bytes = ReadBytes(path);
  bytes.pop_back();
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
  bytes += std::string(5, '\0');
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, ZeroDimsRejected) {
  const std::string path = TempPath("zerodims.fmap");
  std::string bytes("FMAP", 4);
  // version 1, sites 0, dims 1, no payload
  const unsigned char header[12] = {1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0};
  bytes.append(reinterpret_cast<const char*>(header), 12);
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, OversizedHeaderRejected) {
  const std::string path = TempPath("huge.fmap");
  std::string bytes("FMAP", 4);
  const unsigned char header[12] = {1, 0, 0, 0, 0xff, 0xff, 0xff, 0x7f, 0xff, 0xff, 0xff, 0x7f};
  bytes.append(reinterpret_cast<const char*>(header), 12);
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, NonFiniteValuesRejected) {
  pdl::FeatureMap fm;
  fm.sites = 1;
  fm.dims = 1;
  fm.values = {std::numeric_limits<float>::infinity()};
  EXPECT_THROW(pdl::fmap_write(fm, TempPath("inf.fmap")), std::invalid_argument);
  EXPECT_THROW(pdl::FeatureMap::from_values(1, 1, {std::nanf("")}), std::invalid_argument);

  // A file whose payload decodes to NaN is malformed input, not an IO fault.
  pdl::FeatureMap ok = pdl::FeatureMap::from_values(1, 1, {0.0f});
  const std::string path = TempPath("nan_payload.fmap");
  pdl::fmap_write(ok, path);
  std::string bytes = ReadBytes(path);
  bytes[16] = static_cast<char>(0x00);
  bytes[17] = static_cast<char>(0x00);
  bytes[18] = static_cast<char>(0xc0);
  bytes[19] = static_cast<char>(0x7f);
  WriteBytes(path, bytes);
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

TEST(FeatureMapFile, MissingFileIsIoError) {
  EXPECT_THROW(pdl::fmap_read(TempPath("missing_zzz.fmap")), pdl::io_error);
}

TEST(FeatureMapFile, TruncatedHeaderRejected) {
  const std::string path = TempPath("stub.fmap");
  WriteBytes(path, "FMAP\x01");
  EXPECT_THROW(pdl::fmap_read(path), pdl::format_error);
}

}  // namespace
