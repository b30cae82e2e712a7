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

#ifndef PDL_FEATURE_BANK_HPP_
#define PDL_FEATURE_BANK_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pdl/feature_map.hpp"
#include "pdl/image.hpp"
#include "pdl/parallel.hpp"
#include "pdl/rng.hpp"

namespace pdl {

struct ConvLayerSpec {
  int kernels = 0;
  int stride = 1;
};

// A fixed random convolutional stack standing in for a pretrained feature
// extractor: 3x3 kernels, "same" zero padding, no bias, rectified linear
// units, weights drawn once from a seeded stream with He scaling.
struct FeatureBankConfig {
  std::vector<ConvLayerSpec> layers = {{8, 1}, {16, 2}, {32, 2}};
  int seed = 0;
};

namespace detail {

struct Tensor3 {
  int ch = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int ch, int h, int w)
      : ch(ch), h(h), w(w),
        v(static_cast<std::size_t>(ch) * h * w, 0.0) {}

  double at(int c, int y, int x) const {
    return v[(static_cast<std::size_t>(c) * h + y) * w + x];
  }
  double& at(int c, int y, int x) {
    return v[(static_cast<std::size_t>(c) * h + y) * w + x];
  }
};

inline void check_bank_config(const FeatureBankConfig& cfg) {
  if (cfg.layers.empty() || cfg.layers.size() > 16)
    throw std::invalid_argument("feature bank needs 1 to 16 layers");
  long long stride_product = 1;
  for (const ConvLayerSpec& l : cfg.layers) {
    if (l.kernels < 1 || l.kernels > 4096)
      throw std::invalid_argument("layer kernel count must be in [1, 4096]");
    if (l.stride < 1 || l.stride > 16)
      throw std::invalid_argument("layer stride must be in [1, 16]");
    stride_product *= l.stride;
    if (stride_product > 4096)
      throw std::invalid_argument("combined stride exceeds supported size");
  }
}

// Output extent and top/left padding for "same" zero padding: the output
// covers ceil(in / stride) positions and any odd padding pixel goes to the
// bottom/right edge.
inline int same_out(int in, int stride) { return (in + stride - 1) / stride; }

inline int same_pad_begin(int in, int stride) {
  int total = (same_out(in, stride) - 1) * stride + 3 - in;
  if (total < 0) total = 0;
  return total / 2;
}

inline void conv3x3_same(const Tensor3& in, const std::vector<double>& w,
                         int kernels, int stride, Tensor3* out) {
  int oh = same_out(in.h, stride);
  int ow = same_out(in.w, stride);
  int off_y = same_pad_begin(in.h, stride);
  int off_x = same_pad_begin(in.w, stride);
  *out = Tensor3(kernels, oh, ow);
  parallel_for(static_cast<std::size_t>(kernels), [&](std::size_t k) {
    const double* wk = w.data() + k * in.ch * 9;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        int iy0 = oy * stride - off_y;
        int ix0 = ox * stride - off_x;
        double acc = 0.0;
        for (int c = 0; c < in.ch; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            int iy = iy0 + ky;
            if (iy < 0 || iy >= in.h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              int ix = ix0 + kx;
              if (ix < 0 || ix >= in.w) continue;
              acc += wk[(c * 3 + ky) * 3 + kx] * in.at(c, iy, ix);
            }
          }
        }
        out->at(static_cast<int>(k), oy, ox) = acc;
      }
    }
  });
}

// Gradient with respect to the convolution input, gathered per input
// channel so workers never share an output slot.
inline void conv3x3_same_grad_input(const Tensor3& gout,
                                    const std::vector<double>& w, int in_ch,
                                    int in_h, int in_w, int stride,
                                    Tensor3* gin) {
  int off_y = same_pad_begin(in_h, stride);
  int off_x = same_pad_begin(in_w, stride);
  *gin = Tensor3(in_ch, in_h, in_w);
  parallel_for(static_cast<std::size_t>(in_ch), [&](std::size_t c) {
    for (int k = 0; k < gout.ch; ++k) {
      const double* wk = w.data() + static_cast<std::size_t>(k) * in_ch * 9;
      for (int oy = 0; oy < gout.h; ++oy) {
        for (int ox = 0; ox < gout.w; ++ox) {
          double g = gout.at(k, oy, ox);
          if (g == 0.0) continue;
          int iy0 = oy * stride - off_y;
          int ix0 = ox * stride - off_x;
          for (int ky = 0; ky < 3; ++ky) {
            int iy = iy0 + ky;
            if (iy < 0 || iy >= in_h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              int ix = ix0 + kx;
              if (ix < 0 || ix >= in_w) continue;
              gin->at(static_cast<int>(c), iy, ix) +=
                  wk[(c * 3 + ky) * 3 + kx] * g;
            }
          }
        }
      }
    }
  });
}

}  // namespace detail

// Forward-pass record needed to replay the stack backwards: each layer's
// input and pre-activation values.
struct BankTape {
  int in_channels = 0;
  int in_h = 0;
  int in_w = 0;
  std::vector<detail::Tensor3> inputs;
  std::vector<detail::Tensor3> preacts;
};

class FeatureBank {
 public:
  FeatureBank(const FeatureBankConfig& cfg, int in_channels)
      : cfg_(cfg), in_channels_(in_channels) {
    detail::check_bank_config(cfg);
    if (in_channels != 1 && in_channels != 3)
      throw std::invalid_argument("feature bank input must be 1 or 3 channels");

    int in_ch = in_channels;
    for (std::size_t l = 0; l < cfg_.layers.size(); ++l) {
      const ConvLayerSpec& spec = cfg_.layers[l];
      std::vector<double> w(static_cast<std::size_t>(spec.kernels) *
                            in_ch * 9);
      double scale = std::sqrt(2.0 / (in_ch * 9));
      std::uint64_t seed = static_cast<std::uint64_t>(
          static_cast<std::int64_t>(cfg_.seed));
      for (int k = 0; k < spec.kernels; ++k) {
        StreamRng rng(stream_key(
            seed, {kStreamBank, static_cast<std::uint64_t>(l),
                   static_cast<std::uint64_t>(k)}));
        double* wk = w.data() + static_cast<std::size_t>(k) * in_ch * 9;
        for (int i = 0; i < in_ch * 9; ++i) wk[i] = scale * rng.normal();
      }
      weights_.push_back(std::move(w));
      in_ch = spec.kernels;
    }
  }

  // Smallest input extent the stack accepts (both height and width).
  int min_input() const {
    int prod = 1;
    for (const ConvLayerSpec& l : cfg_.layers) prod *= l.stride;
    return 2 * prod;
  }

  int out_dims() const { return cfg_.layers.back().kernels; }

  // Runs the stack and flattens the last activation into a feature map:
  // site (y * out_w + x), dimension = output channel. Pass a tape to keep
  // what backprop and jvp need.
  FeatureMap extract(const Image& img, BankTape* tape = nullptr) const {
    if (img.channels != in_channels_)
      throw std::domain_error("image channels do not match the bank");
    int min = min_input();
    if (img.height < min || img.width < min)
      throw std::domain_error("image is smaller than the bank supports");

    detail::Tensor3 x(img.channels, img.height, img.width);
    for (int y = 0; y < img.height; ++y)
      for (int xx = 0; xx < img.width; ++xx)
        for (int c = 0; c < img.channels; ++c)
          x.at(c, y, xx) = img.at(y, xx, c);

    if (tape != nullptr) {
      tape->in_channels = img.channels;
      tape->in_h = img.height;
      tape->in_w = img.width;
      tape->inputs.clear();
      tape->preacts.clear();
    }

    for (std::size_t l = 0; l < cfg_.layers.size(); ++l) {
      detail::Tensor3 z;
      detail::conv3x3_same(x, weights_[l], cfg_.layers[l].kernels,
                           cfg_.layers[l].stride, &z);
      if (tape != nullptr) {
        tape->inputs.push_back(std::move(x));
        tape->preacts.push_back(z);
      }
      x = std::move(z);
      for (double& v : x.v) {
        if (!(v > 0.0)) v = 0.0;
      }
    }

    FeatureMap fm(static_cast<std::uint32_t>(x.h) * x.w,
                  static_cast<std::uint32_t>(x.ch));
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx)
        for (int c = 0; c < x.ch; ++c)
          fm.at(static_cast<std::uint32_t>(y) * x.w + xx,
                static_cast<std::uint32_t>(c)) =
              static_cast<float>(x.at(c, y, xx));
    return fm;
  }

  // Pulls a site-major gradient over the output features back to the
  // image. The rectifier routes gradient only where the recorded
  // pre-activation was strictly positive. Returns the image-layout
  // (interleaved channel) gradient.
  std::vector<double> backprop(const BankTape& tape,
                               const std::vector<double>& feature_grad) const {
    check_tape(tape);
    const detail::Tensor3& last = tape.preacts.back();
    if (feature_grad.size() !=
        static_cast<std::size_t>(last.ch) * last.h * last.w)
      throw std::domain_error("feature gradient size does not match the tape");

    detail::Tensor3 g(last.ch, last.h, last.w);
    for (int y = 0; y < last.h; ++y)
      for (int x = 0; x < last.w; ++x)
        for (int c = 0; c < last.ch; ++c)
          g.at(c, y, x) =
              feature_grad[(static_cast<std::size_t>(y) * last.w + x) *
                               last.ch +
                           c];

    for (std::size_t l = cfg_.layers.size(); l-- > 0;) {
      const detail::Tensor3& z = tape.preacts[l];
      for (std::size_t i = 0; i < g.v.size(); ++i) {
        if (!(z.v[i] > 0.0)) g.v[i] = 0.0;
      }
      const detail::Tensor3& in = tape.inputs[l];
      detail::Tensor3 gin;
      detail::conv3x3_same_grad_input(g, weights_[l], in.ch, in.h, in.w,
                                      cfg_.layers[l].stride, &gin);
      g = std::move(gin);
    }

    std::vector<double> out(static_cast<std::size_t>(tape.in_h) * tape.in_w *
                            tape.in_channels);
    for (int y = 0; y < tape.in_h; ++y)
      for (int x = 0; x < tape.in_w; ++x)
        for (int c = 0; c < tape.in_channels; ++c)
          out[(static_cast<std::size_t>(y) * tape.in_w + x) *
                  tape.in_channels +
              c] = g.at(c, y, x);
    return out;
  }

  // Directional derivative of extract at the taped point: pushes an
  // image-layout direction forward through the linearized stack and
  // returns the site-major feature perturbation.
  std::vector<double> jvp(const BankTape& tape,
                          const std::vector<double>& image_dir) const {
    check_tape(tape);
    if (image_dir.size() != static_cast<std::size_t>(tape.in_h) * tape.in_w *
                                tape.in_channels)
      throw std::domain_error("direction size does not match the tape");

    detail::Tensor3 dx(tape.in_channels, tape.in_h, tape.in_w);
    for (int y = 0; y < tape.in_h; ++y)
      for (int x = 0; x < tape.in_w; ++x)
        for (int c = 0; c < tape.in_channels; ++c)
          dx.at(c, y, x) =
              image_dir[(static_cast<std::size_t>(y) * tape.in_w + x) *
                            tape.in_channels +
                        c];

    for (std::size_t l = 0; l < cfg_.layers.size(); ++l) {
      detail::Tensor3 dz;
      detail::conv3x3_same(dx, weights_[l], cfg_.layers[l].kernels,
                           cfg_.layers[l].stride, &dz);
      const detail::Tensor3& z = tape.preacts[l];
      for (std::size_t i = 0; i < dz.v.size(); ++i) {
        if (!(z.v[i] > 0.0)) dz.v[i] = 0.0;
      }
      dx = std::move(dz);
    }

    std::vector<double> out(dx.v.size());
    for (int y = 0; y < dx.h; ++y)
      for (int x = 0; x < dx.w; ++x)
        for (int c = 0; c < dx.ch; ++c)
          out[(static_cast<std::size_t>(y) * dx.w + x) * dx.ch + c] =
              dx.at(c, y, x);
    return out;
  }

 private:
  void check_tape(const BankTape& tape) const {
    if (tape.inputs.size() != cfg_.layers.size() ||
        tape.preacts.size() != cfg_.layers.size())
      throw std::domain_error("tape does not match the bank configuration");
    if (tape.in_channels != in_channels_)
      throw std::domain_error("tape channels do not match the bank");
  }

  FeatureBankConfig cfg_;
  int in_channels_;
  std::vector<std::vector<double>> weights_;
};

inline FeatureMap extract(const Image& img, const FeatureBankConfig& cfg,
                          BankTape* tape = nullptr) {
  return FeatureBank(cfg, img.channels).extract(img, tape);
}

inline std::vector<double> backprop(const BankTape& tape,
                                    const std::vector<double>& feature_grad,
                                    const FeatureBankConfig& cfg) {
  return FeatureBank(cfg, tape.in_channels).backprop(tape, feature_grad);
}

inline std::vector<double> jvp(const BankTape& tape,
                               const std::vector<double>& image_dir,
                               const FeatureBankConfig& cfg) {
  return FeatureBank(cfg, tape.in_channels).jvp(tape, image_dir);
}

}  // namespace pdl

#endif  // PDL_FEATURE_BANK_HPP_
