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

#ifndef PDL_LOSS_HPP_
#define PDL_LOSS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdl/distances.hpp"
#include "pdl/feature_bank.hpp"
#include "pdl/feature_map.hpp"
#include "pdl/image.hpp"
#include "pdl/parallel.hpp"
#include "pdl/projections.hpp"

namespace pdl {

struct LossConfig {
  double lambda = 0.01;  // weight of the distribution term
  double p = 1.0;        // order inside the distribution / feature term
  double q = 1.0;        // order of the pixel term
  ProjectionConfig projection;
  FeatureBankConfig bank;
};

struct LossBreakdown {
  double total = 0.0;
  double pixel_term = 0.0;
  double distribution_term = 0.0;
  std::vector<double> per_projection;
};

namespace detail {

inline void check_loss_config(const LossConfig& cfg) {
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0)
    throw std::invalid_argument("lambda must be nonnegative");
  check_order_p(cfg.p);
  check_order_p(cfg.q);
}

inline void check_same_shape(const Image& u, const Image& v) {
  if (u.width != v.width || u.height != v.height ||
      u.channels != v.channels)
    throw std::domain_error("images have different shapes");
}

inline void check_feature_pair(const FeatureMap& fa, const FeatureMap& fb) {
  if (fa.dims != fb.dims)
    throw std::domain_error("feature maps have different dimensions");
  if (fa.sites != fb.sites)
    throw std::domain_error("feature maps have different site counts");
}

inline void check_pixel_term(double pixel_term) {
  if (!std::isfinite(pixel_term) || pixel_term < 0.0)
    throw std::invalid_argument("pixel term must be finite and nonnegative");
}

inline double mean_abs_pow(const std::vector<double>& u,
                           const std::vector<double>& v, double q) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    total += pow_abs(u[i] - v[i], q);
  return total / static_cast<double>(u.size());
}

}  // namespace detail

// Composite loss on feature maps that were extracted elsewhere: the given
// pixel term plus lambda times the mean 1D Wasserstein distance over
// projected feature columns.
inline LossBreakdown pdl_loss_features(const FeatureMap& fa,
                                       const FeatureMap& fb,
                                       double pixel_term,
                                       const LossConfig& cfg) {
  detail::check_loss_config(cfg);
  detail::check_feature_pair(fa, fb);
  detail::check_pixel_term(pixel_term);
  ProjectionMatrix w = make_projections(cfg.projection, fa.dims);
  LossBreakdown b;
  b.pixel_term = pixel_term;
  b.distribution_term =
      detail::projected_distance_mean(fa, fb, w, cfg.p, &b.per_projection);
  b.total = b.pixel_term + cfg.lambda * b.distribution_term;
  return b;
}

// Composite loss on images: mean |u - v|^q plus the projected distribution
// term over bank features of both images.
inline LossBreakdown pdl_loss(const Image& u, const Image& v,
                              const LossConfig& cfg) {
  detail::check_loss_config(cfg);
  detail::check_same_shape(u, v);
  FeatureBank bank(cfg.bank, u.channels);
  FeatureMap fa = bank.extract(u);
  FeatureMap fb = bank.extract(v);
  return pdl_loss_features(fa, fb,
                           detail::mean_abs_pow(u.data, v.data, cfg.q), cfg);
}

// Pointwise perceptual loss on extracted features: the given pixel term
// plus lambda times the mean elementwise |fa - fb|^p. The feature term is
// reported in the distribution_term slot; per_projection stays empty.
inline LossBreakdown percep_loss_features(const FeatureMap& fa,
                                          const FeatureMap& fb,
                                          double pixel_term,
                                          const LossConfig& cfg) {
  detail::check_loss_config(cfg);
  detail::check_feature_pair(fa, fb);
  detail::check_pixel_term(pixel_term);
  double total = 0.0;
  for (std::size_t i = 0; i < fa.values.size(); ++i)
    total += detail::pow_abs(static_cast<double>(fa.values[i]) -
                                 static_cast<double>(fb.values[i]),
                             cfg.p);
  LossBreakdown b;
  b.pixel_term = pixel_term;
  b.distribution_term = total / static_cast<double>(fa.values.size());
  b.total = b.pixel_term + cfg.lambda * b.distribution_term;
  return b;
}

inline LossBreakdown percep_loss(const Image& u, const Image& v,
                                 const LossConfig& cfg) {
  detail::check_loss_config(cfg);
  detail::check_same_shape(u, v);
  FeatureBank bank(cfg.bank, u.channels);
  FeatureMap fa = bank.extract(u);
  FeatureMap fb = bank.extract(v);
  return percep_loss_features(fa, fb,
                              detail::mean_abs_pow(u.data, v.data, cfg.q),
                              cfg);
}

namespace detail {

struct LossEval {
  LossBreakdown breakdown;
  std::vector<double> grad;
};

// Loss value and pixel gradient for p = q = 1, sharing the feature bank
// and the target's features across calls. The pixel part contributes
// sign(u_i - v_i) / n_pix; the distribution part routes
// lambda / (n_sites * n_rows) * sign(a - b) from each sorted projected
// pair back through the projection row and the bank.
inline LossEval pdl_loss_and_grad(const Image& u, const Image& v,
                                  const FeatureBank& bank,
                                  const FeatureMap& fb,
                                  const LossConfig& cfg,
                                  std::uint64_t draw) {
  BankTape tape;
  FeatureMap fa = bank.extract(u, &tape);

  LossEval ev;
  std::size_t n_pix = u.data.size();
  ev.grad.resize(n_pix);
  double pixel = 0.0;
  for (std::size_t i = 0; i < n_pix; ++i) {
    double d = u.data[i] - v.data[i];
    pixel += std::fabs(d);
    double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    ev.grad[i] = s / static_cast<double>(n_pix);
  }
  pixel /= static_cast<double>(n_pix);

  ProjectionMatrix w = make_projections(cfg.projection, fa.dims, draw);
  std::uint32_t n_s = fa.sites;
  std::uint32_t rows = w.rows;

  // Signs per (site, projection), filled column by column.
  std::vector<double> sign_at(static_cast<std::size_t>(n_s) * rows, 0.0);
  std::vector<double> dist(rows);
  parallel_for(rows, [&](std::size_t j) {
    std::vector<double> ca, cb;
    project_column(fa, w, static_cast<std::uint32_t>(j), &ca);
    project_column(fb, w, static_cast<std::uint32_t>(j), &cb);
    std::vector<std::pair<double, std::uint32_t>> pa(n_s);
    for (std::uint32_t s = 0; s < n_s; ++s) pa[s] = {ca[s], s};
    std::sort(pa.begin(), pa.end());
    std::sort(cb.begin(), cb.end());
    double total = 0.0;
    for (std::uint32_t r = 0; r < n_s; ++r) {
      double d = pa[r].first - cb[r];
      total += std::fabs(d);
      sign_at[static_cast<std::size_t>(pa[r].second) * rows + j] =
          d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    }
    dist[j] = total / static_cast<double>(n_s);
  });

  double dist_mean = 0.0;
  for (double d : dist) dist_mean += d;
  dist_mean /= static_cast<double>(rows);

  double scale = cfg.lambda / (static_cast<double>(n_s) * rows);
  std::vector<double> gfeat(static_cast<std::size_t>(n_s) * fa.dims, 0.0);
  parallel_for(n_s, [&](std::size_t site) {
    double* out = gfeat.data() + site * fa.dims;
    const double* signs = sign_at.data() + site * rows;
    for (std::uint32_t j = 0; j < rows; ++j) {
      double s = signs[j];
      if (s == 0.0) continue;
      const double* wj = w.row(j);
      for (std::uint32_t k = 0; k < fa.dims; ++k) out[k] += s * wj[k];
    }
    for (std::uint32_t k = 0; k < fa.dims; ++k) out[k] *= scale;
  });

  std::vector<double> gimg = bank.backprop(tape, gfeat);
  for (std::size_t i = 0; i < n_pix; ++i) ev.grad[i] += gimg[i];

  ev.breakdown.pixel_term = pixel;
  ev.breakdown.distribution_term = dist_mean;
  ev.breakdown.per_projection = std::move(dist);
  ev.breakdown.total = pixel + cfg.lambda * dist_mean;
  return ev;
}

inline void check_gradient_orders(const LossConfig& cfg) {
  if (cfg.p != 1.0 || cfg.q != 1.0)
    throw std::invalid_argument("the analytic gradient requires p = q = 1");
}

}  // namespace detail

// Gradient of pdl_loss with respect to u, in image layout. Defined for
// p = q = 1 only; at ties the subgradient 0 is used.
inline std::vector<double> pdl_gradient(const Image& u, const Image& v,
                                        const LossConfig& cfg) {
  detail::check_loss_config(cfg);
  detail::check_gradient_orders(cfg);
  detail::check_same_shape(u, v);
  FeatureBank bank(cfg.bank, u.channels);
  FeatureMap fb = bank.extract(v);
  return detail::pdl_loss_and_grad(u, v, bank, fb, cfg, 0).grad;
}

struct DescendResult {
  Image image;
  std::vector<LossBreakdown> trace;  // one entry per step plus the endpoint
};

// Plain projected subgradient descent from u0 toward v with a constant
// step, clamping iterates to [0, 1]. trace[k] is the loss at the start of
// step k; the last entry is the loss of the returned image. When
// resample_projections is set, step k draws a fresh projection matrix
// with draw index k.
inline DescendResult descend(const Image& u0, const Image& v,
                             const LossConfig& cfg, int steps,
                             double step_size,
                             bool resample_projections = false) {
  detail::check_loss_config(cfg);
  detail::check_gradient_orders(cfg);
  detail::check_same_shape(u0, v);
  if (steps < 0) throw std::invalid_argument("step count must be >= 0");
  if (!std::isfinite(step_size) || step_size <= 0.0)
    throw std::invalid_argument("step size must be positive");

  FeatureBank bank(cfg.bank, u0.channels);
  FeatureMap fb = bank.extract(v);

  DescendResult result;
  result.image = u0;
  result.trace.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    std::uint64_t draw =
        resample_projections ? static_cast<std::uint64_t>(k) : 0;
    detail::LossEval ev =
        detail::pdl_loss_and_grad(result.image, v, bank, fb, cfg, draw);
    result.trace.push_back(std::move(ev.breakdown));
    if (k == steps) break;
    for (std::size_t i = 0; i < result.image.data.size(); ++i) {
      result.image.data[i] = std::clamp(
          result.image.data[i] - step_size * ev.grad[i], 0.0, 1.0);
    }
  }
  return result;
}

}  // namespace pdl

#endif  // PDL_LOSS_HPP_
