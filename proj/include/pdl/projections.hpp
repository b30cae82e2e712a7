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

#ifndef PDL_PROJECTIONS_HPP_
#define PDL_PROJECTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdl/distances.hpp"
#include "pdl/feature_map.hpp"
#include "pdl/parallel.hpp"
#include "pdl/rng.hpp"

namespace pdl {

// How projection directions are drawn.
//   kId:  the identity; every feature dimension is its own projection.
//   kR2P: a random normalized combination of two distinct dimensions.
//   kRPP: a small random perturbation of an identity row, normalized.
//   kRSP: uniform random directions on the unit sphere.
enum class Scheme { kId, kR2P, kRPP, kRSP };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kId: return "id";
    case Scheme::kR2P: return "r2p";
    case Scheme::kRPP: return "rpp";
    case Scheme::kRSP: return "rsp";
  }
  throw std::invalid_argument("unknown projection scheme");
}

inline Scheme scheme_from_name(const std::string& name) {
  if (name == "id") return Scheme::kId;
  if (name == "r2p") return Scheme::kR2P;
  if (name == "rpp") return Scheme::kRPP;
  if (name == "rsp") return Scheme::kRSP;
  throw std::invalid_argument("unknown projection scheme: " + name);
}

struct ProjectionConfig {
  Scheme scheme = Scheme::kId;
  int factor = 1;  // projections per feature dimension
  int seed = 0;
  double perturbation = 0.1;  // kRPP offset magnitude
};

// factor * dims unit rows, row-major.
struct ProjectionMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dims = 0;
  std::vector<double> weights;

  double at(std::uint32_t row, std::uint32_t dim) const {
    return weights[static_cast<std::size_t>(row) * dims + dim];
  }
  const double* row(std::uint32_t r) const {
    return weights.data() + static_cast<std::size_t>(r) * dims;
  }
};

namespace detail {

inline std::uint64_t scheme_id(Scheme s) {
  switch (s) {
    case Scheme::kId: return 0;
    case Scheme::kR2P: return 1;
    case Scheme::kRPP: return 2;
    case Scheme::kRSP: return 3;
  }
  throw std::invalid_argument("unknown projection scheme");
}

// Scales v to unit Euclidean length; returns false for degenerate draws.
inline bool normalize_row(double* v, std::uint32_t n) {
  double sq = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) sq += v[i] * v[i];
  double norm = std::sqrt(sq);
  if (!(norm > 1e-12)) return false;
  for (std::uint32_t i = 0; i < n; ++i) v[i] /= norm;
  return true;
}

}  // namespace detail

// Draws the projection matrix for a configuration. Every row has its own
// counter stream keyed by (seed, scheme, draw, row), so rows can be built
// in parallel and still match serial output bit for bit. The draw index
// separates repeated resampling rounds (step index during descent); a
// single evaluation uses draw 0.
inline ProjectionMatrix make_projections(const ProjectionConfig& cfg,
                                         std::uint32_t dims,
                                         std::uint64_t draw = 0) {
  if (dims == 0) throw std::domain_error("projections need dims >= 1");
  if (cfg.factor < 1)
    throw std::invalid_argument("projection factor must be >= 1");
  if (!std::isfinite(cfg.perturbation) || cfg.perturbation < 0.0)
    throw std::invalid_argument("perturbation must be nonnegative");
  if (cfg.scheme == Scheme::kId && cfg.factor != 1)
    throw std::invalid_argument("the identity scheme requires factor 1");
  if (cfg.scheme == Scheme::kR2P && dims < 2)
    throw std::invalid_argument("pairwise projections need dims >= 2");
  std::uint64_t rows = static_cast<std::uint64_t>(cfg.factor) * dims;
  if (rows * dims > (1ull << 26))
    throw std::invalid_argument("projection matrix exceeds supported size");

  ProjectionMatrix m;
  m.rows = static_cast<std::uint32_t>(rows);
  m.dims = dims;
  m.weights.assign(static_cast<std::size_t>(rows) * dims, 0.0);

  if (cfg.scheme == Scheme::kId) {
    for (std::uint32_t j = 0; j < dims; ++j)
      m.weights[static_cast<std::size_t>(j) * dims + j] = 1.0;
    return m;
  }

  std::uint64_t seed = static_cast<std::uint64_t>(
      static_cast<std::int64_t>(cfg.seed));
  std::uint64_t sid = detail::scheme_id(cfg.scheme);
  double perturbation = cfg.perturbation;
  Scheme scheme = cfg.scheme;

  parallel_for(rows, [&](std::size_t j) {
    double* w = m.weights.data() + j * dims;
    StreamRng rng(stream_key(seed, {kStreamProjection, sid, draw, j}));
    switch (scheme) {
      case Scheme::kR2P: {
        // Index pair first, then the two coefficients.
        std::uint32_t i1 = static_cast<std::uint32_t>(rng.uniform_int(dims));
        std::uint32_t i2;
        do {
          i2 = static_cast<std::uint32_t>(rng.uniform_int(dims));
        } while (i2 == i1);
        for (;;) {
          w[i1] = rng.normal();
          w[i2] = rng.normal();
          if (detail::normalize_row(w, dims)) break;
        }
        break;
      }
      case Scheme::kRPP: {
        for (;;) {
          for (std::uint32_t k = 0; k < dims; ++k)
            w[k] = perturbation * rng.normal();
          w[j % dims] += 1.0;
          if (detail::normalize_row(w, dims)) break;
        }
        break;
      }
      case Scheme::kRSP: {
        for (;;) {
          for (std::uint32_t k = 0; k < dims; ++k) w[k] = rng.normal();
          if (detail::normalize_row(w, dims)) break;
        }
        break;
      }
      case Scheme::kId:
        break;
    }
  });
  return m;
}

namespace detail {

// Column j of the projected features, widened to double.
inline void project_column(const FeatureMap& fm, const ProjectionMatrix& w,
                           std::uint32_t j, std::vector<double>* out) {
  out->resize(fm.sites);
  const double* row = w.row(j);
  for (std::uint32_t s = 0; s < fm.sites; ++s) {
    const float* f = fm.values.data() + static_cast<std::size_t>(s) * fm.dims;
    double dot = 0.0;
    for (std::uint32_t k = 0; k < fm.dims; ++k) dot += row[k] * f[k];
    (*out)[s] = dot;
  }
}

// Mean over projection rows of the 1D p-Wasserstein distance between the
// projected site values. The single code path behind both the sliced
// distance and the loss distribution term, so the two agree exactly.
inline double projected_distance_mean(const FeatureMap& fa,
                                      const FeatureMap& fb,
                                      const ProjectionMatrix& w, double p,
                                      std::vector<double>* per_projection) {
  if (fa.dims != fb.dims)
    throw std::domain_error("feature maps have different dimensions");
  if (fa.sites != fb.sites)
    throw std::domain_error("feature maps have different site counts");
  if (w.dims != fa.dims)
    throw std::domain_error("projection dims do not match features");
  check_order_p(p);

  std::vector<double> distances(w.rows);
  parallel_for(w.rows, [&](std::size_t j) {
    std::vector<double> ca, cb;
    project_column(fa, w, static_cast<std::uint32_t>(j), &ca);
    project_column(fb, w, static_cast<std::uint32_t>(j), &cb);
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    distances[j] = wasserstein_sorted_equal(ca, cb, p);
  });

  double total = 0.0;
  for (double d : distances) total += d;
  if (per_projection != nullptr) *per_projection = std::move(distances);
  return total / static_cast<double>(w.rows);
}

}  // namespace detail

// Applies the projection matrix to every site's feature vector.
inline FeatureMap project_features(const FeatureMap& fm,
                                   const ProjectionMatrix& w) {
  if (w.dims != fm.dims)
    throw std::domain_error("projection dims do not match features");
  FeatureMap out(fm.sites, w.rows);
  std::vector<double> column;
  for (std::uint32_t j = 0; j < w.rows; ++j) {
    detail::project_column(fm, w, j, &column);
    for (std::uint32_t s = 0; s < fm.sites; ++s)
      out.at(s, j) = static_cast<float>(column[s]);
  }
  return out;
}

// Sliced Wasserstein distance: the mean 1D p-Wasserstein distance over
// projected feature columns drawn per the configuration.
inline double sliced_wasserstein(const FeatureMap& fa, const FeatureMap& fb,
                                 const ProjectionConfig& cfg, double p) {
  if (fa.dims != fb.dims)
    throw std::domain_error("feature maps have different dimensions");
  ProjectionMatrix w = make_projections(cfg, fa.dims);
  return detail::projected_distance_mean(fa, fb, w, p, nullptr);
}

}  // namespace pdl

#endif  // PDL_PROJECTIONS_HPP_
