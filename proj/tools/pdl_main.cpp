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
//
// Command line front end for the projected distribution loss library.
// Every command prints a single key=value report (keys sorted) to stdout;
// the manifest.* keys echo all resolved parameters. Exit codes: 0 success,
// 2 usage or domain error, 3 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdl/pdl.hpp"

namespace {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

const char kUsage[] =
    "usage: pdl <command> [options]\n"
    "\n"
    "commands:\n"
    "  compare <imageA> <imageB>   loss and quality metrics for a pair\n"
    "      [--lambda 0.01] [--scheme id] [--factor 1] [--seed 0]\n"
    "      [--bank-seed 0] [--p 1] [--q 1] [--perturbation 0.1]\n"
    "  toy-shift                   histogram divergences under a shift\n"
    "      [--bins 32] [--shift-max 10] [--eps 1e-6]\n"
    "  ablate <imageA> <imageB>    distribution term across schemes/factors\n"
    "      [--schemes id,r2p,rpp,rsp] [--factors 1,2,4,8] [--seeds 20]\n"
    "      [--seed 0] [--bank-seed 0] [--p 1] [--perturbation 0.1]\n"
    "  descend <start> <target>    subgradient descent on the total loss\n"
    "      --out <image> --trace <csv> [--steps 500] [--step-size 0.05]\n"
    "      [--lambda 0.01] [--scheme id] [--factor 1] [--seed 0]\n"
    "      [--bank-seed 0] [--perturbation 0.1] [--projection-resample off]\n"
    "  extract <image>             write the feature map of an image\n"
    "      --out <fmap> [--bank-seed 0]\n"
    "  fmap-pdl <fmapA> <fmapB>    loss on stored feature maps\n"
    "      [--pixel-term 0] [--lambda 0.01] [--scheme id] [--factor 1]\n"
    "      [--seed 0] [--p 1] [--perturbation 0.1]\n"
    "\n"
    "Images are binary PGM/PPM with maxval 255. PDL_THREADS caps worker\n"
    "threads; results do not depend on it. The identity scheme admits only\n"
    "factor 1, so ablate reports it once per factor list.\n";

struct Args {
  std::vector<std::string> positional;
  std::map<std::string, std::string> flags;
};

Args parse_args(int argc, char** argv, int first,
                const std::set<std::string>& allowed) {
  Args args;
  for (int i = first; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) == 0) {
      std::string name = arg.substr(2);
      std::string value;
      std::size_t eq = name.find('=');
      if (eq != std::string::npos) {
        value = name.substr(eq + 1);
        name = name.substr(0, eq);
      } else {
        if (i + 1 >= argc)
          throw UsageError("flag --" + name + " needs a value");
        value = argv[++i];
      }
      if (allowed.find(name) == allowed.end())
        throw UsageError("unknown flag --" + name);
      if (!args.flags.emplace(name, value).second)
        throw UsageError("duplicate flag --" + name);
    } else {
      args.positional.push_back(arg);
    }
  }
  return args;
}

double flag_real(const Args& args, const std::string& name,
                 double fallback) {
  auto it = args.flags.find(name);
  if (it == args.flags.end()) return fallback;
  const std::string& s = it->second;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw UsageError("flag --" + name + " needs a finite number, got '" + s +
                     "'");
  return v;
}

long long flag_int(const Args& args, const std::string& name,
                   long long fallback, long long lo, long long hi) {
  auto it = args.flags.find(name);
  long long v = fallback;
  if (it != args.flags.end()) {
    const std::string& s = it->second;
    char* end = nullptr;
    v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
      throw UsageError("flag --" + name + " needs an integer, got '" + s +
                       "'");
  }
  if (v < lo || v > hi)
    throw UsageError("flag --" + name + " must be in [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  return v;
}

std::string flag_str(const Args& args, const std::string& name,
                     const std::string& fallback) {
  auto it = args.flags.find(name);
  return it == args.flags.end() ? fallback : it->second;
}

std::string flag_required(const Args& args, const std::string& name) {
  auto it = args.flags.find(name);
  if (it == args.flags.end())
    throw UsageError("flag --" + name + " is required");
  return it->second;
}

bool flag_onoff(const Args& args, const std::string& name, bool fallback) {
  auto it = args.flags.find(name);
  if (it == args.flags.end()) return fallback;
  if (it->second == "on") return true;
  if (it->second == "off") return false;
  throw UsageError("flag --" + name + " must be on or off");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    parts.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

// Zero-padded decimal wide enough for the largest value in a key group, so
// lexicographic key order equals numeric order.
std::string padded(long long value, long long max_value) {
  std::size_t width = 1;
  for (long long v = max_value; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(value);
  if (digits.size() < width)
    digits.insert(digits.begin(), width - digits.size(), '0');
  return digits;
}

double mean_abs_diff_pow(const std::vector<double>& u,
                         const std::vector<double>& v, double q) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = std::fabs(u[i] - v[i]);
    total += q == 1.0 ? d : std::pow(d, q);
  }
  return total / static_cast<double>(u.size());
}

void check_image_pair(const pdl::Image& u, const pdl::Image& v) {
  if (u.width != v.width || u.height != v.height ||
      u.channels != v.channels)
    throw std::domain_error("images have different shapes");
}

pdl::LossConfig loss_config_from(const Args& args, bool with_q) {
  pdl::LossConfig cfg;
  cfg.lambda = flag_real(args, "lambda", 0.01);
  cfg.p = flag_real(args, "p", 1.0);
  cfg.q = with_q ? flag_real(args, "q", 1.0) : 1.0;
  cfg.projection.scheme =
      pdl::scheme_from_name(flag_str(args, "scheme", "id"));
  cfg.projection.factor =
      static_cast<int>(flag_int(args, "factor", 1, 1, 1 << 20));
  cfg.projection.seed = static_cast<int>(
      flag_int(args, "seed", 0, -(1ll << 31), (1ll << 31) - 1));
  cfg.projection.perturbation = flag_real(args, "perturbation", 0.1);
  cfg.bank.seed = static_cast<int>(
      flag_int(args, "bank-seed", 0, -(1ll << 31), (1ll << 31) - 1));
  return cfg;
}

void manifest_loss_config(const pdl::LossConfig& cfg, bool with_q,
                          pdl::RunManifest* manifest) {
  manifest->add("lambda", cfg.lambda);
  manifest->add("scheme", pdl::scheme_name(cfg.projection.scheme));
  manifest->add_int("factor", cfg.projection.factor);
  manifest->add_int("seed", cfg.projection.seed);
  manifest->add("perturbation", cfg.projection.perturbation);
  manifest->add_int("bank-seed", cfg.bank.seed);
  manifest->add("p", cfg.p);
  if (with_q) manifest->add("q", cfg.q);
}

int emit(const pdl::RunManifest& manifest, pdl::Report* report) {
  manifest.write_to(report);
  std::fputs(report->str().c_str(), stdout);
  return 0;
}

int cmd_compare(const Args& args) {
  if (args.positional.size() != 2)
    throw UsageError("compare needs two image paths");
  pdl::LossConfig cfg = loss_config_from(args, true);

  pdl::Image u = pdl::image_read(args.positional[0]);
  pdl::Image v = pdl::image_read(args.positional[1]);
  check_image_pair(u, v);

  pdl::FeatureBank bank(cfg.bank, u.channels);
  pdl::FeatureMap fa = bank.extract(u);
  pdl::FeatureMap fb = bank.extract(v);
  double pixel = mean_abs_diff_pow(u.data, v.data, cfg.q);

  pdl::MetricReport metrics;
  metrics.pdl = pdl::pdl_loss_features(fa, fb, pixel, cfg);
  metrics.swd = pdl::sliced_wasserstein(fa, fb, cfg.projection, cfg.p);
  pdl::LossBreakdown percep = pdl::percep_loss_features(fa, fb, pixel, cfg);
  try {
    metrics.psnr = pdl::psnr(u, v);
  } catch (const pdl::perfect_match_error&) {
    metrics.psnr.reset();
  }
  pdl::validate(metrics);

  pdl::RunManifest manifest;
  manifest.command = "compare";
  manifest.add("image-a", args.positional[0]);
  manifest.add("image-b", args.positional[1]);
  manifest_loss_config(cfg, true, &manifest);

  pdl::Report report;
  report.set("pdl.total", metrics.pdl->total);
  report.set("pdl.pixel", metrics.pdl->pixel_term);
  report.set("pdl.distribution", metrics.pdl->distribution_term);
  report.set("percep.total", percep.total);
  report.set("percep.feature", percep.distribution_term);
  report.set("swd", *metrics.swd);
  if (metrics.psnr)
    report.set("psnr", *metrics.psnr);
  else
    report.set("psnr", "inf");
  return emit(manifest, &report);
}

int cmd_toy_shift(const Args& args) {
  if (!args.positional.empty())
    throw UsageError("toy-shift takes no positional arguments");
  long long bins = flag_int(args, "bins", 32, 4, 4096);
  long long shift_max = flag_int(args, "shift-max", 10, 0, 4093);
  double eps = flag_real(args, "eps", 1e-6);
  if (bins < shift_max + 3)
    throw UsageError("toy-shift needs bins >= shift-max + 3");

  std::vector<double> centers(bins);
  for (long long i = 0; i < bins; ++i) centers[i] = static_cast<double>(i);
  const double base_masses[3] = {0.2, 0.5, 0.3};

  auto shifted = [&](long long k) {
    std::vector<double> masses(bins, 0.0);
    for (int i = 0; i < 3; ++i) masses[k + i] = base_masses[i];
    return pdl::Histogram::from_data(std::move(masses), centers);
  };

  pdl::Histogram base = shifted(0);
  pdl::Report report;
  for (long long k = 0; k <= shift_max; ++k) {
    pdl::Histogram moved = shifted(k);
    std::string prefix = "shift" + padded(k, shift_max);
    report.set_int(prefix + ".shift", k);
    report.set(prefix + ".emd", pdl::emd_hist(base, moved));
    report.set(prefix + ".kld", pdl::kld(base, moved, eps));
    report.set(prefix + ".jsd", pdl::jsd(base, moved, eps));
  }

  pdl::RunManifest manifest;
  manifest.command = "toy-shift";
  manifest.add_int("bins", bins);
  manifest.add_int("shift-max", shift_max);
  manifest.add("eps", eps);
  return emit(manifest, &report);
}

int cmd_ablate(const Args& args) {
  if (args.positional.size() != 2)
    throw UsageError("ablate needs two image paths");
  std::string schemes_csv = flag_str(args, "schemes", "id,r2p,rpp,rsp");
  std::string factors_csv = flag_str(args, "factors", "1,2,4,8");
  long long seed_count = flag_int(args, "seeds", 20, 1, 10000);
  long long base_seed = flag_int(args, "seed", 0, -(1ll << 31), 1ll << 30);
  double p = flag_real(args, "p", 1.0);
  double perturbation = flag_real(args, "perturbation", 0.1);
  int bank_seed = static_cast<int>(
      flag_int(args, "bank-seed", 0, -(1ll << 31), (1ll << 31) - 1));

  std::vector<pdl::Scheme> schemes;
  for (const std::string& name : split_csv(schemes_csv))
    schemes.push_back(pdl::scheme_from_name(name));
  std::vector<int> factors;
  long long max_factor = 1;
  for (const std::string& part : split_csv(factors_csv)) {
    char* end = nullptr;
    long long f = std::strtoll(part.c_str(), &end, 10);
    if (part.empty() || end != part.c_str() + part.size() || f < 1 ||
        f > (1 << 20))
      throw UsageError("bad factor list entry '" + part + "'");
    factors.push_back(static_cast<int>(f));
    max_factor = std::max(max_factor, f);
  }

  pdl::Image u = pdl::image_read(args.positional[0]);
  pdl::Image v = pdl::image_read(args.positional[1]);
  check_image_pair(u, v);
  pdl::FeatureBankConfig bank_cfg;
  bank_cfg.seed = bank_seed;
  pdl::FeatureBank bank(bank_cfg, u.channels);
  pdl::FeatureMap fa = bank.extract(u);
  pdl::FeatureMap fb = bank.extract(v);

  pdl::Report report;
  for (pdl::Scheme scheme : schemes) {
    for (int factor : factors) {
      // The identity scheme admits only factor 1.
      if (scheme == pdl::Scheme::kId && factor != 1) continue;
      std::vector<double> values;
      values.reserve(seed_count);
      for (long long s = 0; s < seed_count; ++s) {
        pdl::ProjectionConfig pc;
        pc.scheme = scheme;
        pc.factor = factor;
        pc.seed = static_cast<int>(base_seed + s);
        pc.perturbation = perturbation;
        values.push_back(pdl::sliced_wasserstein(fa, fb, pc, p));
      }
      double mean = 0.0;
      for (double d : values) mean += d;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double d : values) var += (d - mean) * (d - mean);
      double stdev = values.size() > 1
                         ? std::sqrt(var / static_cast<double>(
                                               values.size() - 1))
                         : 0.0;
      std::string prefix = std::string(pdl::scheme_name(scheme)) + ".f" +
                           padded(factor, max_factor);
      report.set(prefix + ".mean", mean);
      report.set(prefix + ".stdev", stdev);
    }
  }

  pdl::RunManifest manifest;
  manifest.command = "ablate";
  manifest.add("image-a", args.positional[0]);
  manifest.add("image-b", args.positional[1]);
  manifest.add("schemes", schemes_csv);
  manifest.add("factors", factors_csv);
  manifest.add_int("seeds", seed_count);
  manifest.add_int("seed", base_seed);
  manifest.add_int("bank-seed", bank_seed);
  manifest.add("p", p);
  manifest.add("perturbation", perturbation);
  return emit(manifest, &report);
}

int cmd_descend(const Args& args) {
  if (args.positional.size() != 2)
    throw UsageError("descend needs start and target image paths");
  pdl::LossConfig cfg = loss_config_from(args, false);
  long long steps = flag_int(args, "steps", 500, 0, 1000000);
  double step_size = flag_real(args, "step-size", 0.05);
  if (step_size <= 0.0) throw UsageError("flag --step-size must be positive");
  bool resample = flag_onoff(args, "projection-resample", false);
  std::string out_path = flag_required(args, "out");
  std::string trace_path = flag_required(args, "trace");

  pdl::Image u0 = pdl::image_read(args.positional[0]);
  pdl::Image v = pdl::image_read(args.positional[1]);
  check_image_pair(u0, v);

  pdl::DescendResult result = pdl::descend(u0, v, cfg, static_cast<int>(steps),
                                           step_size, resample);
  pdl::image_write(result.image, out_path);

  std::ofstream trace(trace_path, std::ios::trunc);
  if (!trace) throw pdl::io_error("cannot open " + trace_path + " for writing");
  trace << "step,total,pixel,distribution\n";
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const pdl::LossBreakdown& row = result.trace[k];
    trace << k << ',' << pdl::format_real(row.total) << ','
          << pdl::format_real(row.pixel_term) << ','
          << pdl::format_real(row.distribution_term) << '\n';
  }
  trace.flush();
  if (!trace) throw pdl::io_error("write failed for " + trace_path);

  pdl::RunManifest manifest;
  manifest.command = "descend";
  manifest.add("image-start", args.positional[0]);
  manifest.add("image-target", args.positional[1]);
  manifest_loss_config(cfg, false, &manifest);
  manifest.add_int("steps", steps);
  manifest.add("step-size", step_size);
  manifest.add("projection-resample", resample ? "on" : "off");
  manifest.add("out", out_path);
  manifest.add("trace", trace_path);

  pdl::Report report;
  report.set("initial.total", result.trace.front().total);
  report.set("final.total", result.trace.back().total);
  return emit(manifest, &report);
}

int cmd_extract(const Args& args) {
  if (args.positional.size() != 1)
    throw UsageError("extract needs one image path");
  int bank_seed = static_cast<int>(
      flag_int(args, "bank-seed", 0, -(1ll << 31), (1ll << 31) - 1));
  std::string out_path = flag_required(args, "out");

  pdl::Image img = pdl::image_read(args.positional[0]);
  pdl::FeatureBankConfig bank_cfg;
  bank_cfg.seed = bank_seed;
  pdl::FeatureMap fm = pdl::extract(img, bank_cfg);
  pdl::fmap_write(fm, out_path);

  pdl::RunManifest manifest;
  manifest.command = "extract";
  manifest.add("image", args.positional[0]);
  manifest.add_int("bank-seed", bank_seed);
  manifest.add("out", out_path);

  pdl::Report report;
  report.set_int("fmap.sites", fm.sites);
  report.set_int("fmap.dims", fm.dims);
  return emit(manifest, &report);
}

int cmd_fmap_pdl(const Args& args) {
  if (args.positional.size() != 2)
    throw UsageError("fmap-pdl needs two feature map paths");
  pdl::LossConfig cfg = loss_config_from(args, false);
  double pixel_term = flag_real(args, "pixel-term", 0.0);

  pdl::FeatureMap fa = pdl::fmap_read(args.positional[0]);
  pdl::FeatureMap fb = pdl::fmap_read(args.positional[1]);
  pdl::LossBreakdown b = pdl::pdl_loss_features(fa, fb, pixel_term, cfg);

  pdl::RunManifest manifest;
  manifest.command = "fmap-pdl";
  manifest.add("fmap-a", args.positional[0]);
  manifest.add("fmap-b", args.positional[1]);
  manifest.add("pixel-term", pixel_term);
  manifest.add("lambda", cfg.lambda);
  manifest.add("scheme", pdl::scheme_name(cfg.projection.scheme));
  manifest.add_int("factor", cfg.projection.factor);
  manifest.add_int("seed", cfg.projection.seed);
  manifest.add("perturbation", cfg.projection.perturbation);
  manifest.add("p", cfg.p);

  pdl::Report report;
  report.set("pdl.total", b.total);
  report.set("pdl.pixel", b.pixel_term);
  report.set("pdl.distribution", b.distribution_term);
  return emit(manifest, &report);
}

const std::set<std::string> kCompareFlags = {
    "lambda", "scheme", "factor", "seed", "bank-seed",
    "p",      "q",      "perturbation"};
const std::set<std::string> kToyShiftFlags = {"bins", "shift-max", "eps"};
const std::set<std::string> kAblateFlags = {
    "schemes", "factors", "seeds",        "seed",
    "bank-seed", "p",     "perturbation"};
const std::set<std::string> kDescendFlags = {
    "lambda", "scheme",    "factor",   "seed",
    "bank-seed", "perturbation", "steps", "step-size",
    "projection-resample", "out",   "trace"};
const std::set<std::string> kExtractFlags = {"bank-seed", "out"};
const std::set<std::string> kFmapPdlFlags = {
    "pixel-term", "lambda", "scheme", "factor",
    "seed",       "p",      "perturbation"};

}  // namespace

int main(int argc, char** argv) {
  try {
    if (argc < 2) {
      std::fputs(kUsage, stderr);
      return 2;
    }
    std::string command = argv[1];
    if (command == "help" || command == "--help" || command == "-h") {
      std::fputs(kUsage, stdout);
      return 0;
    }
    if (command == "compare")
      return cmd_compare(parse_args(argc, argv, 2, kCompareFlags));
    if (command == "toy-shift")
      return cmd_toy_shift(parse_args(argc, argv, 2, kToyShiftFlags));
    if (command == "ablate")
      return cmd_ablate(parse_args(argc, argv, 2, kAblateFlags));
    if (command == "descend")
      return cmd_descend(parse_args(argc, argv, 2, kDescendFlags));
    if (command == "extract")
      return cmd_extract(parse_args(argc, argv, 2, kExtractFlags));
    if (command == "fmap-pdl")
      return cmd_fmap_pdl(parse_args(argc, argv, 2, kFmapPdlFlags));
    throw UsageError("unknown command: " + command);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "pdl: %s\n", e.what());
    std::fputs("run 'pdl help' for usage\n", stderr);
    return 2;
  } catch (const pdl::io_error& e) {
    std::fprintf(stderr, "pdl: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pdl: %s\n", e.what());
    return 2;
  }
}
