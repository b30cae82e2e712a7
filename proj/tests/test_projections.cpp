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

#include "pdl/projections.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "pdl/distances.hpp"
#include "pdl/parallel.hpp"

namespace {

using pdl::FeatureMap;
using pdl::ProjectionConfig;
using pdl::ProjectionMatrix;
using pdl::Scheme;

FeatureMap RandomFeatures(std::mt19937_64& gen, std::uint32_t sites,
                          std::uint32_t dims, double lo = -1.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  FeatureMap fm(sites, dims);
  for (float& v : fm.values) v = static_cast<float>(dist(gen));
  return fm;
}

ProjectionConfig Config(Scheme scheme, int factor, int seed) {
  ProjectionConfig cfg;
  cfg.scheme = scheme;
  cfg.factor = factor;
  cfg.seed = seed;
  return cfg;
}

TEST(SchemeNames, RoundTrip) {
  for (Scheme s : {Scheme::kId, Scheme::kR2P, Scheme::kRPP, Scheme::kRSP})
    EXPECT_EQ(pdl::scheme_from_name(pdl::scheme_name(s)), s);
  EXPECT_THROW(pdl::scheme_from_name("vgg"), std::invalid_argument);
}

TEST(MakeProjections, IdentityIsExact) {
  ProjectionMatrix m = pdl::make_projections(Config(Scheme::kId, 1, 7), 5);
  EXPECT_EQ(m.rows, 5u);
  EXPECT_EQ(m.dims, 5u);
  for (std::uint32_t r = 0; r < 5; ++r)
    for (std::uint32_t d = 0; d < 5; ++d)
      EXPECT_EQ(m.at(r, d), r == d ? 1.0 : 0.0);
}

TEST(MakeProjections, Validation) {
  EXPECT_THROW(pdl::make_projections(Config(Scheme::kId, 2, 0), 4),
               std::invalid_argument);
  EXPECT_THROW(pdl::make_projections(Config(Scheme::kRSP, 0, 0), 4),
               std::invalid_argument);
  EXPECT_THROW(pdl::make_projections(Config(Scheme::kR2P, 1, 0), 1),
               std::invalid_argument);
  EXPECT_THROW(pdl::make_projections(Config(Scheme::kRSP, 1, 0), 0),
               std::domain_error);
  ProjectionConfig bad = Config(Scheme::kRPP, 1, 0);
  bad.perturbation = -0.5;
  EXPECT_THROW(pdl::make_projections(bad, 4), std::invalid_argument);
}

TEST(MakeProjections, RowsHaveUnitNorm) {
  for (Scheme s : {Scheme::kR2P, Scheme::kRPP, Scheme::kRSP}) {
    ProjectionMatrix m = pdl::make_projections(Config(s, 3, 11), 6);
    EXPECT_EQ(m.rows, 18u);
    for (std::uint32_t r = 0; r < m.rows; ++r) {
      double sq = 0.0;
      for (std::uint32_t d = 0; d < m.dims; ++d) sq += m.at(r, d) * m.at(r, d);
      EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-9) << pdl::scheme_name(s) << " row " << r;
    }
  }
}

TEST(MakeProjections, PairwiseRowsTouchTwoDims) {
  ProjectionMatrix m = pdl::make_projections(Config(Scheme::kR2P, 4, 23), 8);
  for (std::uint32_t r = 0; r < m.rows; ++r) {
    int nonzero = 0;
    for (std::uint32_t d = 0; d < m.dims; ++d)
      if (m.at(r, d) != 0.0) ++nonzero;
    EXPECT_EQ(nonzero, 2) << "row " << r;
  }
}

TEST(MakeProjections, SeedAndDrawReproducibility) {
  for (Scheme s : {Scheme::kR2P, Scheme::kRPP, Scheme::kRSP}) {
    ProjectionMatrix a = pdl::make_projections(Config(s, 2, 42), 5);
    ProjectionMatrix b = pdl::make_projections(Config(s, 2, 42), 5);
    ASSERT_EQ(a.weights.size(), b.weights.size());
    EXPECT_EQ(std::memcmp(a.weights.data(), b.weights.data(),
                          a.weights.size() * sizeof(double)),
              0);

    ProjectionMatrix c = pdl::make_projections(Config(s, 2, 43), 5);
    EXPECT_NE(std::memcmp(a.weights.data(), c.weights.data(),
                          a.weights.size() * sizeof(double)),
              0);

    ProjectionMatrix d = pdl::make_projections(Config(s, 2, 42), 5, 1);
    EXPECT_NE(std::memcmp(a.weights.data(), d.weights.data(),
                          a.weights.size() * sizeof(double)),
              0);
    ProjectionMatrix e = pdl::make_projections(Config(s, 2, 42), 5, 1);
    EXPECT_EQ(std::memcmp(d.weights.data(), e.weights.data(),
                          d.weights.size() * sizeof(double)),
              0);
  }
}

TEST(MakeProjections, ThreadCountDoesNotChangeBits) {
  for (Scheme s : {Scheme::kR2P, Scheme::kRPP, Scheme::kRSP}) {
    pdl::set_max_threads(1);
    ProjectionMatrix serial = pdl::make_projections(Config(s, 4, 9), 7);
    pdl::set_max_threads(4);
    ProjectionMatrix threaded = pdl::make_projections(Config(s, 4, 9), 7);
    pdl::set_max_threads(0);
    EXPECT_EQ(std::memcmp(serial.weights.data(), threaded.weights.data(),
                          serial.weights.size() * sizeof(double)),
              0)
        << pdl::scheme_name(s);
  }
}

TEST(MakeProjections, ZeroPerturbationIsIdentity) {
  ProjectionConfig cfg = Config(Scheme::kRPP, 1, 5);
  cfg.perturbation = 0.0;
  ProjectionMatrix m = pdl::make_projections(cfg, 4);
  for (std::uint32_t r = 0; r < 4; ++r)
    for (std::uint32_t d = 0; d < 4; ++d)
      EXPECT_EQ(m.at(r, d), r == d ? 1.0 : 0.0);
}

TEST(ProjectFeatures, MatchesNaiveMatmul) {
  std::mt19937_64 gen(77);
  FeatureMap fm = RandomFeatures(gen, 12, 6);
  ProjectionMatrix w = pdl::make_projections(Config(Scheme::kRSP, 3, 3), 6);
  FeatureMap out = pdl::project_features(fm, w);
  ASSERT_EQ(out.sites, fm.sites);
  ASSERT_EQ(out.dims, w.rows);
  for (std::uint32_t s = 0; s < fm.sites; ++s) {
    for (std::uint32_t j = 0; j < w.rows; ++j) {
      double dot = 0.0;
      for (std::uint32_t k = 0; k < fm.dims; ++k)
        dot += w.at(j, k) * static_cast<double>(fm.at(s, k));
      EXPECT_EQ(out.at(s, j), static_cast<float>(dot));
    }
  }
}

TEST(ProjectFeatures, IdentityPassesThrough) {
  std::mt19937_64 gen(78);
  FeatureMap fm = RandomFeatures(gen, 9, 4);
  ProjectionMatrix id = pdl::make_projections(Config(Scheme::kId, 1, 0), 4);
  FeatureMap out = pdl::project_features(fm, id);
  EXPECT_EQ(std::memcmp(out.values.data(), fm.values.data(),
                        fm.values.size() * sizeof(float)),
            0);
}

TEST(ProjectFeatures, SingleSiteDotProduct) {
  FeatureMap fm = FeatureMap::from_values(1, 2, {3.0f, 4.0f});
  ProjectionMatrix w;
  w.rows = 1;
  w.dims = 2;
  w.weights = {0.6, 0.8};
  FeatureMap out = pdl::project_features(fm, w);
  EXPECT_FLOAT_EQ(out.at(0, 0), 5.0f);
}

TEST(SlicedWasserstein, IdentityEqualsPerDimensionDistance) {
  std::mt19937_64 gen(79);
  FeatureMap fa = RandomFeatures(gen, 20, 3);
  FeatureMap fb = RandomFeatures(gen, 20, 3);
  double sw = pdl::sliced_wasserstein(fa, fb, Config(Scheme::kId, 1, 0), 1.0);

  double expected = 0.0;
  for (std::uint32_t d = 0; d < 3; ++d) {
    std::vector<double> ca, cb;
    for (std::uint32_t s = 0; s < 20; ++s) {
      ca.push_back(fa.at(s, d));
      cb.push_back(fb.at(s, d));
    }
    expected += pdl::wasserstein_1d(pdl::EmpiricalDist1D(ca),
                                    pdl::EmpiricalDist1D(cb), 1.0);
  }
  expected /= 3.0;
  EXPECT_NEAR(sw, expected, 1e-12);
}

TEST(SlicedWasserstein, OneDimFeaturesDegenerate) {
  std::mt19937_64 gen(80);
  FeatureMap fa = RandomFeatures(gen, 15, 1);
  FeatureMap fb = RandomFeatures(gen, 15, 1);
  std::vector<double> ca(fa.values.begin(), fa.values.end());
  std::vector<double> cb(fb.values.begin(), fb.values.end());
  double direct = pdl::wasserstein_1d(pdl::EmpiricalDist1D(ca),
                                      pdl::EmpiricalDist1D(cb), 1.0);
  // A unit vector in one dimension is +1 or -1 and |W| is unaffected by
  // the sign, so every scheme must collapse to the plain 1D distance.
  for (Scheme s : {Scheme::kId, Scheme::kRPP, Scheme::kRSP}) {
    double sw = pdl::sliced_wasserstein(fa, fb, Config(s, 1, 12), 1.0);
    EXPECT_NEAR(sw, direct, 1e-12) << pdl::scheme_name(s);
  }
}

TEST(SlicedWasserstein, SymmetricBitwise) {
  std::mt19937_64 gen(81);
  FeatureMap fa = RandomFeatures(gen, 18, 5);
  FeatureMap fb = RandomFeatures(gen, 18, 5);
  for (Scheme s : {Scheme::kId, Scheme::kR2P, Scheme::kRPP, Scheme::kRSP}) {
    int factor = s == Scheme::kId ? 1 : 2;
    double ab = pdl::sliced_wasserstein(fa, fb, Config(s, factor, 4), 1.0);
    double ba = pdl::sliced_wasserstein(fb, fa, Config(s, factor, 4), 1.0);
    EXPECT_EQ(ab, ba) << pdl::scheme_name(s);
  }
  EXPECT_EQ(pdl::sliced_wasserstein(fa, fa, Config(Scheme::kRSP, 2, 4), 2.0),
            0.0);
}

TEST(SlicedWasserstein, ShapeGuards) {
  std::mt19937_64 gen(82);
  FeatureMap fa = RandomFeatures(gen, 10, 3);
  FeatureMap fb = RandomFeatures(gen, 10, 4);
  EXPECT_THROW(pdl::sliced_wasserstein(fa, fb, Config(Scheme::kRSP, 1, 0), 1.0),
               std::domain_error);
  FeatureMap fc = RandomFeatures(gen, 11, 3);
  EXPECT_THROW(pdl::sliced_wasserstein(fa, fc, Config(Scheme::kRSP, 1, 0), 1.0),
               std::domain_error);
  ProjectionMatrix w = pdl::make_projections(Config(Scheme::kRSP, 1, 0), 5);
  EXPECT_THROW(pdl::project_features(fa, w), std::domain_error);
}

// Shifting every feature vector by a constant t makes each projected pair
// differ by <theta, t>, so the sliced distance is the average of
// |<theta, t>| over directions, which tends to (2/pi) * |t| in two
// dimensions.
TEST(SlicedWasserstein, UniformDirectionsRecoverShiftNorm) {
  const std::uint32_t kSites = 4;
  const double tx = 0.3, ty = -0.4;
  const double norm_t = 0.5;
  std::mt19937_64 gen(83);
  FeatureMap fa = RandomFeatures(gen, kSites, 2);
  FeatureMap fb = fa;
  for (std::uint32_t s = 0; s < kSites; ++s) {
    fb.at(s, 0) += static_cast<float>(tx);
    fb.at(s, 1) += static_cast<float>(ty);
  }
  ProjectionConfig cfg = Config(Scheme::kRSP, 512, 31);
  double sw = pdl::sliced_wasserstein(fa, fb, cfg, 1.0);
  double expected = 2.0 / std::numbers::pi * norm_t;
  EXPECT_NEAR(sw, expected, 0.06 * expected);
}

// Spherical directions are rotation invariant in distribution, so rotating
// both feature sets should leave the average sliced distance unchanged up
// to sampling noise.
TEST(SlicedWasserstein, RotationEquivariantOnAverage) {
  const int kSeeds = 20;
  std::mt19937_64 gen(84);
  FeatureMap fa = RandomFeatures(gen, 16, 2);
  FeatureMap fb = RandomFeatures(gen, 16, 2);

  const double phi = 0.7;
  auto rotate = [&](const FeatureMap& fm) {
    FeatureMap out = fm;
    for (std::uint32_t s = 0; s < fm.sites; ++s) {
      double x = fm.at(s, 0), y = fm.at(s, 1);
      out.at(s, 0) = static_cast<float>(std::cos(phi) * x - std::sin(phi) * y);
      out.at(s, 1) = static_cast<float>(std::sin(phi) * x + std::cos(phi) * y);
    }
    return out;
  };
  FeatureMap ra = rotate(fa), rb = rotate(fb);

  std::vector<double> plain, rotated;
  for (int s = 0; s < kSeeds; ++s) {
    plain.push_back(
        pdl::sliced_wasserstein(fa, fb, Config(Scheme::kRSP, 32, 100 + s), 1.0));
    rotated.push_back(
        pdl::sliced_wasserstein(ra, rb, Config(Scheme::kRSP, 32, 200 + s), 1.0));
  }
  auto mean_se = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>(m, std::sqrt(var / v.size()));
  };
  auto [m1, se1] = mean_se(plain);
  auto [m2, se2] = mean_se(rotated);
  EXPECT_NEAR(m1, m2, 3.0 * std::sqrt(se1 * se1 + se2 * se2) + 1e-6);
}

// More projections per dimension average out direction noise: the spread
// of the estimate across seeds must shrink as the factor grows.
TEST(SlicedWasserstein, FactorReducesSeedVariance) {
  const int kSeeds = 30;
  std::mt19937_64 gen(85);
  FeatureMap fa = RandomFeatures(gen, 12, 4);
  FeatureMap fb = RandomFeatures(gen, 12, 4);

  auto spread = [&](int factor) {
    std::vector<double> vals;
    for (int s = 0; s < kSeeds; ++s)
      vals.push_back(pdl::sliced_wasserstein(
          fa, fb, Config(Scheme::kRSP, factor, 300 + s), 1.0));
    double m = 0.0;
    for (double v : vals) m += v;
    m /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - m) * (v - m);
    return std::sqrt(var / (vals.size() - 1));
  };
  EXPECT_LT(spread(8), spread(1));
}

TEST(ProjectedDistanceMean, PerProjectionBreakdown) {
  std::mt19937_64 gen(86);
  FeatureMap fa = RandomFeatures(gen, 10, 3);
  FeatureMap fb = RandomFeatures(gen, 10, 3);
  ProjectionMatrix w = pdl::make_projections(Config(Scheme::kRSP, 2, 17), 3);
  std::vector<double> per;
  double mean = pdl::detail::projected_distance_mean(fa, fb, w, 1.0, &per);
  ASSERT_EQ(per.size(), w.rows);
  double total = 0.0;
  for (double d : per) {
    EXPECT_GE(d, 0.0);
    total += d;
  }
  EXPECT_EQ(mean, total / static_cast<double>(w.rows));
}

TEST(ProjectedDistanceMean, ThreadCountDoesNotChangeBits) {
  std::mt19937_64 gen(87);
  FeatureMap fa = RandomFeatures(gen, 24, 6);
  FeatureMap fb = RandomFeatures(gen, 24, 6);
  ProjectionMatrix w = pdl::make_projections(Config(Scheme::kRSP, 4, 19), 6);
  pdl::set_max_threads(1);
  double serial = pdl::detail::projected_distance_mean(fa, fb, w, 1.5, nullptr);
  pdl::set_max_threads(4);
  double threaded =
      pdl::detail::projected_distance_mean(fa, fb, w, 1.5, nullptr);
  pdl::set_max_threads(0);
  EXPECT_EQ(serial, threaded);
}

}  // namespace
