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

#ifndef PDL_DISTANCES_HPP_
#define PDL_DISTANCES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pdl {

namespace detail {

inline void check_order_p(double p) {
  if (!std::isfinite(p) || p < 1.0)
    throw std::domain_error("order p must be finite and >= 1");
}

inline double pow_abs(double x, double p) {
  if (p == 1.0) return std::fabs(x);
  if (p == 2.0) return x * x;
  return std::pow(std::fabs(x), p);
}

inline double root_p(double x, double p) {
  if (p == 1.0) return x;
  return std::pow(x, 1.0 / p);
}

// Mean of |a_i - b_i|^p over two aligned ascending arrays, then the p-th
// root. This is the equal-size quantile pairing; both loss evaluation and
// projected distances funnel through it.
inline double wasserstein_sorted_equal(const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += pow_abs(a[i] - b[i], p);
  return root_p(total / static_cast<double>(a.size()), p);
}

}  // namespace detail

// One-dimensional empirical distribution: mass 1/n at each sample.
// Samples are kept sorted ascending.
class EmpiricalDist1D {
 public:
  explicit EmpiricalDist1D(std::vector<double> samples)
      : samples_(std::move(samples)) {
    if (samples_.empty())
      throw std::invalid_argument("empirical distribution needs samples");
    for (double v : samples_) {
      if (!std::isfinite(v))
        throw std::invalid_argument("samples must be finite");
    }
    std::sort(samples_.begin(), samples_.end());
  }

  const std::vector<double>& sorted() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<double> samples_;
};

// Exact p-Wasserstein distance between two 1D empirical distributions.
//
// Equal sample counts reduce to pairing the order statistics. Unequal
// counts integrate |Qa(t) - Qb(t)|^p over the merged quantile grid
// {i/na} u {j/nb}; breakpoints are walked as integer multiples of
// 1/(na*nb), so interval boundaries are exact.
inline double wasserstein_1d(const EmpiricalDist1D& a,
                             const EmpiricalDist1D& b, double p) {
  detail::check_order_p(p);
  const std::vector<double>& av = a.sorted();
  const std::vector<double>& bv = b.sorted();
  if (av.size() == bv.size())
    return detail::wasserstein_sorted_equal(av, bv, p);

  std::int64_t na = static_cast<std::int64_t>(av.size());
  std::int64_t nb = static_cast<std::int64_t>(bv.size());
  double denom = static_cast<double>(na) * static_cast<double>(nb);
  std::int64_t cur = 0;  // position as a multiple of 1/(na*nb)
  std::int64_t ia = 0, ib = 0;
  double total = 0.0;
  while (ia < na && ib < nb) {
    std::int64_t next_a = (ia + 1) * nb;
    std::int64_t next_b = (ib + 1) * na;
    std::int64_t next = std::min(next_a, next_b);
    total += detail::pow_abs(av[ia] - bv[ib], p) *
             (static_cast<double>(next - cur) / denom);
    cur = next;
    if (next_a == next) ++ia;
    if (next_b == next) ++ib;
  }
  return detail::root_p(total, p);
}

// Point set in R^d with uniform mass; rows of a count x dim matrix.
struct PointCloud {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> points;

  static PointCloud from_points(std::size_t count, std::size_t dim,
                                std::vector<double> values) {
    if (count == 0 || dim == 0)
      throw std::invalid_argument("point cloud needs count and dim >= 1");
    if (values.size() != count * dim)
      throw std::invalid_argument("point payload size does not match shape");
    for (double v : values) {
      if (!std::isfinite(v))
        throw std::invalid_argument("points must be finite");
    }
    PointCloud c;
    c.count = count;
    c.dim = dim;
    c.points = std::move(values);
    return c;
  }

  double at(std::size_t i, std::size_t k) const {
    return points[i * dim + k];
  }
};

// Reference optimal transport cost by exhaustive search over assignments:
// the minimum over permutations s of ((1/n) * sum_i |A_i - B_s(i)|_2^p)^(1/p).
// Factorial cost; refuses clouds larger than 10 points.
inline double brute_force_ot(const PointCloud& a, const PointCloud& b,
                             double p) {
  detail::check_order_p(p);
  if (a.dim != b.dim)
    throw std::domain_error("point clouds have different dimensions");
  if (a.count != b.count)
    throw std::domain_error("point clouds have different sizes");
  if (a.count > 10)
    throw std::length_error("brute-force search is limited to 10 points");

  std::size_t n = a.count;
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < a.dim; ++k) {
        double d = a.at(i, k) - b.at(j, k);
        sq += d * d;
      }
      cost[i * n + j] = detail::pow_abs(std::sqrt(sq), p);
    }
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return detail::root_p(best / static_cast<double>(n), p);
}

// Histogram over a shared 1D bin grid: nonnegative masses summing to 1,
// strictly increasing bin centers.
struct Histogram {
  std::vector<double> masses;
  std::vector<double> centers;

  static Histogram from_data(std::vector<double> masses,
                             std::vector<double> centers) {
    if (masses.empty() || masses.size() != centers.size())
      throw std::invalid_argument(
          "histogram needs matching nonempty masses and centers");
    double total = 0.0;
    for (double m : masses) {
      if (!std::isfinite(m) || m < 0.0)
        throw std::invalid_argument("histogram masses must be nonnegative");
      total += m;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("histogram masses must sum to 1");
    for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
      if (!(centers[i] < centers[i + 1]))
        throw std::invalid_argument(
            "histogram centers must be strictly increasing");
    }
    for (double c : centers) {
      if (!std::isfinite(c))
        throw std::invalid_argument("histogram centers must be finite");
    }
    Histogram h;
    h.masses = std::move(masses);
    h.centers = std::move(centers);
    return h;
  }
};

namespace detail {

inline void check_same_bins(const Histogram& h1, const Histogram& h2) {
  if (h1.centers.size() != h2.centers.size())
    throw std::domain_error("histograms have different bin counts");
  for (std::size_t i = 0; i < h1.centers.size(); ++i) {
    if (h1.centers[i] != h2.centers[i])
      throw std::domain_error("histograms have different bin centers");
  }
}

inline void check_smoothing_eps(double eps) {
  if (!std::isfinite(eps) || eps <= 0.0)
    throw std::domain_error("smoothing epsilon must be positive");
}

}  // namespace detail

// Kullback-Leibler divergence in nats. Both histograms are smoothed as
// (mass + eps) / (1 + bins * eps) so empty bins stay finite.
inline double kld(const Histogram& h1, const Histogram& h2,
                  double eps = 1e-6) {
  detail::check_same_bins(h1, h2);
  detail::check_smoothing_eps(eps);
  std::size_t n = h1.masses.size();
  double denom = 1.0 + static_cast<double>(n) * eps;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = (h1.masses[i] + eps) / denom;
    double q = (h2.masses[i] + eps) / denom;
    total += p * std::log(p / q);
  }
  return total;
}

// Jensen-Shannon divergence in nats, via the equal-weight mixture.
inline double jsd(const Histogram& h1, const Histogram& h2,
                  double eps = 1e-6) {
  detail::check_same_bins(h1, h2);
  detail::check_smoothing_eps(eps);
  std::vector<double> mid(h1.masses.size());
  for (std::size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (h1.masses[i] + h2.masses[i]);
  Histogram m = Histogram::from_data(std::move(mid), h1.centers);
  return 0.5 * kld(h1, m, eps) + 0.5 * kld(h2, m, eps);
}

// Earth mover's distance between histograms on a shared grid, with the
// distance between neighbouring bin centers as ground metric:
// sum_i |C1_i - C2_i| * (center_{i+1} - center_i) over cumulative sums C.
inline double emd_hist(const Histogram& h1, const Histogram& h2) {
  detail::check_same_bins(h1, h2);
  double c1 = 0.0, c2 = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < h1.masses.size(); ++i) {
    c1 += h1.masses[i];
    c2 += h2.masses[i];
    total += std::fabs(c1 - c2) * (h1.centers[i + 1] - h1.centers[i]);
  }
  return total;
}

}  // namespace pdl

#endif  // PDL_DISTANCES_HPP_
