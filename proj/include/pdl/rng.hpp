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

#ifndef PDL_RNG_HPP_
#define PDL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace pdl {

// SplitMix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ull;

// Domain tags keep unrelated consumers of the same user seed decorrelated.
enum RngDomain : std::uint64_t {
  kStreamProjection = 1,
  kStreamBank = 2,
};

// Derives a stream key from a user seed and a list of stream identifiers
// (domain tag, then consumer-specific indices). Each component folds in
// through the finalizer, so distinct identifier tuples give unrelated keys.
inline std::uint64_t stream_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> ids) {
  std::uint64_t key = mix64(seed + kRngGamma);
  for (std::uint64_t id : ids) key = mix64((key + kRngGamma) ^ id);
  return key;
}

// Counter-mode generator: draw i of a stream is a pure function of
// (key, i). Any subrange of the stream can be generated independently,
// on any thread, in any order, and always yields the same values.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kRngGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1p-53;
  }

  // Standard normal via Box-Muller; consumes counters 2i and 2i+1.
  double normal(std::uint64_t i) const {
    double u1 = (static_cast<double>(bits(2 * i) >> 11) + 1.0) * 0x1p-53;
    double u2 = static_cast<double>(bits(2 * i + 1) >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

// Sequential view of a counter stream, for consumers whose contract is a
// fixed draw order rather than indexed access.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t key) : rng_(key) {}

  std::uint64_t bits() { return rng_.bits(next_++); }

  double uniform01() {
    return static_cast<double>(bits() >> 11) * 0x1p-53;
  }

  double normal() {
    double u1 = (static_cast<double>(bits() >> 11) + 1.0) * 0x1p-53;
    double u2 = static_cast<double>(bits() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Unbiased integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound) {
    std::uint64_t limit = ~0ull - ~0ull % bound;
    std::uint64_t r;
    do {
      r = bits();
    } while (r >= limit);
    return r % bound;
  }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace pdl

#endif  // PDL_RNG_HPP_
