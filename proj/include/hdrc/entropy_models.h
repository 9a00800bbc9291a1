// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDRC_ENTROPY_MODELS_H_
#define HDRC_ENTROPY_MODELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hdrc/autograd.h"
#include "hdrc/layers.h"
#include "hdrc/networks.h"
#include "hdrc/ops.h"
#include "hdrc/range_coder.h"

namespace hdrc {

inline constexpr double kSigmaMin = 0.11;
inline constexpr double kLikelihoodFloor = 1.0 / 65536.0;
// Coding support is mu +- kSupportSigmas * sigma, within [kSymbolMin,
// kSymbolMax].
inline constexpr double kSupportSigmas = 32.0;

// floor(x + 0.5), elementwise. Throws ParameterError on non-finite input.
double quantize(double x);
Tensor quantize(const Tensor& x);
std::vector<std::int32_t> to_symbols(const Tensor& quantized);

// x + u with u ~ U(-0.5, 0.5); the gradient passes straight through.
ag::Var noise_proxy(const ag::Var& x, Rng& rng);

// Interval mass of N(mu, sigma^2) over [n - 0.5, n + 0.5], floored at 2^-16.
double gaussian_pmf(double n, double mu, double sigma);
// Same quantity on graph values (broadcasting).
ag::Var gaussian_likelihood(const ag::Var& y, const ag::Var& mu,
                            const ag::Var& sigma);
// Coding distribution: floored pmf over mu +- 32 sigma (clipped to the global
// bound), escape mass for the rest, renormalized and quantized.
CodingDistribution gaussian_distribution(double mu, double sigma);
// The renormalized pmf over the coding support (support values then escape).
std::vector<double> gaussian_support_pmf(double mu, double sigma, int* lo);

// -sum(log2(likelihood)).
ag::Var bits(const ag::Var& likelihood);

struct EntropyParams {
  ag::Var mu;
  ag::Var sigma;
};

// 5x5 convolution over strictly-past raster positions (all channels).
class ContextModel {
 public:
  static constexpr int kKernel = 5;

  ContextModel() = default;
  ContextModel(ParamStore& store, const std::string& name, int in_channels,
               int out_channels, Rng& rng);
  ag::Var operator()(const ag::Var& y_hat) const;
  // Serial evaluation at one position; reads only positions before (i, j).
  void at(const Tensor& y_hat, int i, int j, std::span<double> out) const;
  int out_channels() const { return out_channels_; }
  static bool causal(int ky, int kx) {
    return ky < kKernel / 2 || (ky == kKernel / 2 && kx < kKernel / 2);
  }

 private:
  int in_channels_ = 0;
  int out_channels_ = 0;
  ag::Var weight_;
  ag::Var bias_;
  ag::Var mask_;
};

// mu = raw[:C], sigma = kSigmaMin + softplus(raw[C:]).
EntropyParams split_params(const ag::Var& raw, int latent_channels);
double sigma_from_raw(double raw);

// Pointwise network from conditioning features to raw (mu, sigma) outputs.
class ParameterNet {
 public:
  ParameterNet() = default;
  ParameterNet(ParamStore& store, const std::string& name, int in_channels,
               int latent_channels, Rng& rng);
  // [N, 2C, h, w].
  ag::Var operator()(const ag::Var& features) const;
  // Serial evaluation on one feature vector; out has 2C entries.
  void at(std::span<const double> features, std::span<double> out) const;

 private:
  std::vector<Conv2d> layers_;
};

// Per-channel learned monotone cumulative (1-3-3-1 with softplus weights and
// tanh nonlinear factors).
class FactorizedPrior {
 public:
  FactorizedPrior() = default;
  FactorizedPrior(ParamStore& store, const std::string& name, int channels,
                  Rng& rng);
  ag::Var likelihood(const ag::Var& z) const;
  // Unfloored interval mass for channel c.
  double pmf(int c, double n) const;
  double cdf(int c, double x) const { return ag::sigmoid_value(logits(c, x)); }
  // Per-channel coding tables.
  std::vector<CodingDistribution> coding_tables() const;
  int channels() const { return channels_; }

 private:
  ag::Var logits(const ag::Var& x) const;
  double logits(int c, double x) const;

  int channels_ = 0;
  // Parameters of the (k)-th layer, row-major [out][in], each [1, C, 1, 1].
  std::vector<std::vector<ag::Var>> matrices_;
  std::vector<std::vector<ag::Var>> biases_;
  std::vector<std::vector<ag::Var>> factors_;
};

struct LdrRate {
  ag::Var y_hat;
  ag::Var z_hat;
  ag::Var bits_y;
  ag::Var bits_z;
};

// Hyperprior + autoregressive context model of the LDR latent.
class LdrEntropyModel {
 public:
  LdrEntropyModel() = default;
  LdrEntropyModel(ParamStore& store, const NetworkConfig& cfg, Rng& rng);

  ag::Var hyper_analysis(const ag::Var& y) const;
  // Cropped to the latent extent h x w.
  ag::Var hyper_synthesis(const ag::Var& z_hat, int h, int w) const;
  ag::Var context(const ag::Var& y_hat) const { return context_(y_hat); }
  EntropyParams params(const ag::Var& psi, const ag::Var& ctx) const;

  // With rng: noise-proxied latents; without: hard quantization.
  LdrRate forward(const ag::Var& y, Rng* rng) const;
  // Rate in bits of quantized latents.
  double rate(const Tensor& y_bar, const Tensor& z_bar) const;

  Shape hyper_shape(const Shape& y_shape) const;
  std::vector<std::uint8_t> encode(const Tensor& y_bar,
                                   const Tensor& z_bar) const;
  struct Decoded {
    Tensor y_bar;
    Tensor z_bar;
  };
  Decoded decode(std::span<const std::uint8_t> bytes,
                 const Shape& y_shape) const;

  int latent_channels() const { return latent_channels_; }
  const FactorizedPrior& prior() const { return prior_; }

 private:
  // The pmf source for the joint symbol sequence (z channel-major, then y in
  // raster order with channels innermost).
  PmfProvider provider(const Shape& y_shape) const;

  int latent_channels_ = 0;
  int hyper_channels_ = 0;
  Conv2d ha1_, ha2_, ha3_;
  Conv2d hs1_;
  Upsample hs2_, hs3_;
  Conv2d hs4_;
  ContextModel context_;
  ParameterNet params_;
  FactorizedPrior prior_;
};

struct HdrRate {
  ag::Var y_hat;
  ag::Var bits_y;
};

// Context-only model of the HDR latent (or per-channel Gaussians when
// use_context is false).
class HdrEntropyModel {
 public:
  HdrEntropyModel() = default;
  HdrEntropyModel(ParamStore& store, const NetworkConfig& cfg, Rng& rng);

  EntropyParams params(const ag::Var& y_hat) const;
  HdrRate forward(const ag::Var& y, Rng* rng) const;
  double rate(const Tensor& y_bar) const;
  std::vector<std::uint8_t> encode(const Tensor& y_bar) const;
  Tensor decode(std::span<const std::uint8_t> bytes,
                const Shape& y_shape) const;

 private:
  PmfProvider provider(const Shape& y_shape) const;

  int latent_channels_ = 0;
  bool use_context_ = true;
  ContextModel context_;
  ParameterNet params_;
  ag::Var bias_;  // [1, 2C, 1, 1]: mu offsets then raw sigma offsets
};

}  // namespace hdrc

#endif  // HDRC_ENTROPY_MODELS_H_
