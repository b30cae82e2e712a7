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

#ifndef PDL_METRICS_HPP_
#define PDL_METRICS_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>

#include "pdl/errors.hpp"
#include "pdl/image.hpp"
#include "pdl/loss.hpp"

namespace pdl {

// Peak signal-to-noise ratio over unit-range images: 10 * log10(1 / MSE).
// Identical images have no finite value and raise perfect_match_error.
inline double psnr(const Image& u, const Image& v) {
  detail::check_same_shape(u, v);
  double mse = 0.0;
  for (std::size_t i = 0; i < u.data.size(); ++i) {
    double d = u.data[i] - v.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.data.size());
  if (mse == 0.0)
    throw perfect_match_error("identical images have unbounded PSNR");
  return 10.0 * std::log10(1.0 / mse);
}

// Aggregated quality score: each metric normalized by the best value over
// the compared configurations, with LPIPS inverted since lower is better.
// MS-SSIM and LPIPS values come from external evaluation.
inline double score(double psnr_value, double msssim, double lpips,
                    double psnr_best, double msssim_best,
                    double lpips_best) {
  double args[6] = {psnr_value, msssim, lpips,
                    psnr_best,  msssim_best, lpips_best};
  for (double a : args) {
    if (!std::isfinite(a) || a <= 0.0)
      throw std::domain_error("score inputs must be positive and finite");
  }
  if (msssim > 1.0 || msssim_best > 1.0)
    throw std::domain_error("MS-SSIM values cannot exceed 1");
  return (psnr_value / psnr_best) * (msssim / msssim_best) *
         (lpips_best / lpips);
}

// Per-pair results. psnr is absent when the pair is identical; msssim,
// lpips and swd are filled only when they were computed or supplied.
struct MetricReport {
  std::optional<double> psnr;
  std::optional<double> msssim;
  std::optional<double> lpips;
  std::optional<double> swd;
  std::optional<LossBreakdown> pdl;
};

inline void validate(const MetricReport& r) {
  if (r.psnr && !std::isfinite(*r.psnr))
    throw std::domain_error("PSNR must be finite");
  if (r.msssim && (!std::isfinite(*r.msssim) || *r.msssim < 0.0 ||
                   *r.msssim > 1.0))
    throw std::domain_error("MS-SSIM must lie in [0, 1]");
  if (r.lpips && (!std::isfinite(*r.lpips) || *r.lpips < 0.0))
    throw std::domain_error("LPIPS must be finite and nonnegative");
  if (r.swd && (!std::isfinite(*r.swd) || *r.swd < 0.0))
    throw std::domain_error("sliced distance must be finite and nonnegative");
  if (r.pdl) {
    if (!std::isfinite(r.pdl->total) || !std::isfinite(r.pdl->pixel_term) ||
        !std::isfinite(r.pdl->distribution_term))
      throw std::domain_error("loss terms must be finite");
    if (r.pdl->pixel_term < 0.0 || r.pdl->distribution_term < 0.0)
      throw std::domain_error("loss terms must be nonnegative");
  }
}

}  // namespace pdl

#endif  // PDL_METRICS_HPP_
