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

#include "hdrc/entropy_models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "hdrc/errors.h"
#include "hdrc/ops.h"

namespace hdrc {
namespace {

constexpr int kPriorFilters[4] = {1, 3, 3, 1};
constexpr double kPriorInitScale = 10.0;
// Prior support keeps symbols whose mass reaches this level.
constexpr double kPriorTailMass = 1e-9;

double interval_mass(double n, double mu, double sigma) {
  const double v = std::fabs(n - mu);
  return ag::normal_cdf_value((0.5 - v) / sigma) -
         ag::normal_cdf_value((-0.5 - v) / sigma);
}

std::vector<double> normalized(std::vector<double> p) {
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

// Position-major symbol order of a [1, C, h, w] latent: raster over (i, j),
// channels innermost.
std::vector<std::int32_t> raster_symbols(const Tensor& t) {
  const Shape& s = t.shape();
  std::vector<std::int32_t> out;
  out.reserve(t.size());
  for (int i = 0; i < s.h; ++i) {
    for (int j = 0; j < s.w; ++j) {
      for (int c = 0; c < s.c; ++c) {
        out.push_back(static_cast<std::int32_t>(t.at(0, c, i, j)));
      }
    }
  }
  return out;
}

void write_position(Tensor& t, std::span<const std::int32_t> symbols,
                    std::size_t pos) {
  const Shape& s = t.shape();
  const int i = static_cast<int>(pos) / s.w;
  const int j = static_cast<int>(pos) % s.w;
  for (int c = 0; c < s.c; ++c) t.at(0, c, i, j) = symbols[pos * s.c + c];
}

void check_latent_shape(const Shape& s) {
  if (s.n != 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("latent must have shape [1, C, h, w], got " + s.str());
  }
}

}  // namespace

double quantize(double x) {
  if (!std::isfinite(x))
    throw ParameterError("cannot quantize a non-finite value");
  return std::floor(x + 0.5);
}

Tensor quantize(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = quantize(x[i]);
  return out;
}

std::vector<std::int32_t> to_symbols(const Tensor& quantized) {
  std::vector<std::int32_t> out(quantized.size());
  for (std::size_t i = 0; i < quantized.size(); ++i) {
    const double v = quantized[i];
    if (v != std::floor(v) ||
        std::fabs(v) > std::numeric_limits<std::int32_t>::max()) {
      throw ParameterError("latent is not quantized to representable integers");
    }
    out[i] = static_cast<std::int32_t>(v);
  }
  return out;
}

ag::Var noise_proxy(const ag::Var& x, Rng& rng) {
  Tensor u(x.shape());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.uniform() - 0.5;
  return ag::add(x, ag::constant(std::move(u)));
}

double gaussian_pmf(double n, double mu, double sigma) {
  return std::max(kLikelihoodFloor, interval_mass(n, mu, sigma));
}

ag::Var gaussian_likelihood(const ag::Var& y, const ag::Var& mu,
                            const ag::Var& sigma) {
  const ag::Var v = ag::abs(ag::sub(y, mu));
  const ag::Var upper =
      ag::normal_cdf(ag::div(ag::add_scalar(ag::neg(v), 0.5), sigma));
  const ag::Var lower =
      ag::normal_cdf(ag::div(ag::add_scalar(ag::neg(v), -0.5), sigma));
  return ag::floor_at(ag::sub(upper, lower), kLikelihoodFloor);
}

std::vector<double> gaussian_support_pmf(double mu, double sigma, int* lo) {
  if (!std::isfinite(mu) || !(sigma > 0) || !std::isfinite(sigma)) {
    throw ParameterError("invalid Gaussian parameters");
  }
  double a =
      std::max<double>(kSymbolMin, std::floor(mu - kSupportSigmas * sigma));
  double b =
      std::min<double>(kSymbolMax, std::ceil(mu + kSupportSigmas * sigma));
  if (a > b) {
    a = b = std::clamp<double>(std::floor(mu + 0.5), kSymbolMin, kSymbolMax);
  }
  *lo = static_cast<int>(a);
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(b - a) + 2);
  double covered = 0.0;
  for (double n = a; n <= b; n += 1.0) {
    const double m = interval_mass(n, mu, sigma);
    covered += m;
    p.push_back(std::max(kLikelihoodFloor, m));
  }
  p.push_back(std::max(kLikelihoodFloor, 1.0 - covered));
  return normalized(std::move(p));
}

CodingDistribution gaussian_distribution(double mu, double sigma) {
  int lo = 0;
  const std::vector<double> p = gaussian_support_pmf(mu, sigma, &lo);
  return quantize_distribution(lo, std::span(p).first(p.size() - 1), p.back());
}

ag::Var bits(const ag::Var& likelihood) {
  return ag::mul_scalar(ag::sum(ag::log(likelihood)), -1.0 / std::numbers::ln2);
}

ContextModel::ContextModel(ParamStore& store, const std::string& name,
                           int in_channels, int out_channels, Rng& rng)
    : in_channels_(in_channels), out_channels_(out_channels) {
  const int causal_taps = kKernel * kKernel / 2;
  const double bound =
      std::sqrt(3.0 / (static_cast<double>(in_channels) * causal_taps));
  Tensor mask(Shape{out_channels, in_channels, kKernel, kKernel});
  for (int o = 0; o < out_channels; ++o) {
    for (int c = 0; c < in_channels; ++c) {
      for (int ky = 0; ky < kKernel; ++ky) {
        for (int kx = 0; kx < kKernel; ++kx) {
          mask.at(o, c, ky, kx) = causal(ky, kx) ? 1.0 : 0.0;
        }
      }
    }
  }
  weight_ = store.create_uniform(name + ".weight", mask.shape(), bound, rng);
  Tensor& w = weight_.mutable_value();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= mask[i];
  bias_ =
      store.create_constant(name + ".bias", Shape{1, out_channels, 1, 1}, 0.0);
  mask_ = ag::constant(std::move(mask));
}

ag::Var ContextModel::operator()(const ag::Var& y_hat) const {
  if (y_hat.shape().c != in_channels_) {
    throw ShapeError("context model expects " + std::to_string(in_channels_) +
                     " channels, got " + y_hat.shape().str());
  }
  return ag::conv2d(y_hat, ag::mul(weight_, mask_), bias_, 1, kKernel / 2);
}

void ContextModel::at(const Tensor& y_hat, int i, int j,
                      std::span<double> out) const {
  const Tensor& w = weight_.value();
  const Tensor& b = bias_.value();
  const Shape& s = y_hat.shape();
  const int r = kKernel / 2;
  for (int o = 0; o < out_channels_; ++o) {
    double acc = b[o];
    for (int c = 0; c < in_channels_; ++c) {
      for (int ky = 0; ky <= r; ++ky) {
        const int yi = i + ky - r;
        if (yi < 0 || yi >= s.h) continue;
        for (int kx = 0; kx < kKernel; ++kx) {
          if (!causal(ky, kx)) break;
          const int xj = j + kx - r;
          if (xj < 0 || xj >= s.w) continue;
          acc += w.at(o, c, ky, kx) * y_hat.at(0, c, yi, xj);
        }
      }
    }
    out[o] = acc;
  }
}

EntropyParams split_params(const ag::Var& raw, int latent_channels) {
  EntropyParams p;
  p.mu = ag::slice_channels(raw, 0, latent_channels);
  p.sigma = ag::add_scalar(ag::softplus(ag::slice_channels(
                               raw, latent_channels, 2 * latent_channels)),
                           kSigmaMin);
  return p;
}

double sigma_from_raw(double raw) {
  return kSigmaMin + ag::softplus_value(raw);
}

ParameterNet::ParameterNet(ParamStore& store, const std::string& name,
                           int in_channels, int latent_channels, Rng& rng) {
  const int hidden = 2 * latent_channels;
  layers_.emplace_back(store, name + ".fc1", in_channels, hidden, 1, 1, rng,
                       1.4);
  layers_.emplace_back(store, name + ".fc2", hidden, hidden, 1, 1, rng, 1.4);
  layers_.emplace_back(store, name + ".fc3", hidden, 2 * latent_channels, 1, 1,
                       rng);
}

ag::Var ParameterNet::operator()(const ag::Var& features) const {
  ag::Var h = features;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    h = layers_[k](h);
    if (k + 1 < layers_.size()) h = ag::gelu(h);
  }
  return h;
}

void ParameterNet::at(std::span<const double> features,
                      std::span<double> out) const {
  std::vector<double> in(features.begin(), features.end());
  std::vector<double> next;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Tensor& w = layers_[k].weight().value();
    const Tensor& b = layers_[k].bias().value();
    const int cout = w.shape().n;
    const int cin = w.shape().c;
    if (static_cast<int>(in.size()) != cin) {
      throw ShapeError("parameter network input size mismatch");
    }
    next.assign(cout, 0.0);
    for (int o = 0; o < cout; ++o) {
      double acc = b[o];
      const double* row = w.data() + static_cast<std::size_t>(o) * cin;
      for (int c = 0; c < cin; ++c) acc += row[c] * in[c];
      next[o] = k + 1 < layers_.size() ? ag::gelu_value(acc) : acc;
    }
    in.swap(next);
  }
  std::copy(in.begin(), in.end(), out.begin());
}

FactorizedPrior::FactorizedPrior(ParamStore& store, const std::string& name,
                                 int channels, Rng& rng)
    : channels_(channels) {
  const double scale = std::pow(kPriorInitScale, 1.0 / 3.0);
  const Shape s{1, channels, 1, 1};
  for (int k = 0; k < 3; ++k) {
    const int rows = kPriorFilters[k + 1];
    const int cols = kPriorFilters[k];
    const double init = std::log(std::expm1(1.0 / scale / rows));
    const std::string layer = name + ".layer" + std::to_string(k);
    matrices_.emplace_back();
    biases_.emplace_back();
    factors_.emplace_back();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        matrices_[k].push_back(store.create_constant(
            layer + ".matrix" + std::to_string(r) + "_" + std::to_string(c), s,
            init));
      }
      biases_[k].push_back(store.create_uniform(
          layer + ".bias" + std::to_string(r), s, 0.5, rng));
      if (k < 2) {
        factors_[k].push_back(store.create_constant(
            layer + ".factor" + std::to_string(r), s, 0.0));
      }
    }
  }
}

ag::Var FactorizedPrior::logits(const ag::Var& x) const {
  std::vector<ag::Var> h = {x};
  for (int k = 0; k < 3; ++k) {
    const int rows = kPriorFilters[k + 1];
    const int cols = kPriorFilters[k];
    std::vector<ag::Var> next;
    for (int r = 0; r < rows; ++r) {
      ag::Var acc = biases_[k][r];
      for (int c = 0; c < cols; ++c) {
        acc = ag::add(acc,
                      ag::mul(ag::softplus(matrices_[k][r * cols + c]), h[c]));
      }
      if (k < 2)
        acc = ag::add(acc, ag::mul(ag::tanh(factors_[k][r]), ag::tanh(acc)));
      next.push_back(acc);
    }
    h = std::move(next);
  }
  return h[0];
}

double FactorizedPrior::logits(int ch, double x) const {
  double h[3] = {x, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const int rows = kPriorFilters[k + 1];
    const int cols = kPriorFilters[k];
    double next[3] = {0.0, 0.0, 0.0};
    for (int r = 0; r < rows; ++r) {
      double acc = biases_[k][r].value()[ch];
      for (int c = 0; c < cols; ++c) {
        acc +=
            ag::softplus_value(matrices_[k][r * cols + c].value()[ch]) * h[c];
      }
      if (k < 2) acc += std::tanh(factors_[k][r].value()[ch]) * std::tanh(acc);
      next[r] = acc;
    }
    std::copy(next, next + 3, h);
  }
  return h[0];
}

ag::Var FactorizedPrior::likelihood(const ag::Var& z) const {
  if (z.shape().c != channels_) throw ShapeError("prior channel mismatch");
  const ag::Var lower = logits(ag::add_scalar(z, -0.5));
  const ag::Var upper = logits(ag::add_scalar(z, 0.5));
  // Evaluate in the tail where the sigmoid difference is best conditioned.
  Tensor sign(z.shape());
  for (std::size_t i = 0; i < sign.size(); ++i) {
    sign[i] = lower.value()[i] + upper.value()[i] > 0 ? -1.0 : 1.0;
  }
  const ag::Var s = ag::constant(std::move(sign));
  const ag::Var p = ag::abs(
      ag::sub(ag::sigmoid(ag::mul(s, upper)), ag::sigmoid(ag::mul(s, lower))));
  return ag::floor_at(p, kLikelihoodFloor);
}

double FactorizedPrior::pmf(int c, double n) const {
  const double lower = logits(c, n - 0.5);
  const double upper = logits(c, n + 0.5);
  const double s = lower + upper > 0 ? -1.0 : 1.0;
  return std::fabs(ag::sigmoid_value(s * upper) - ag::sigmoid_value(s * lower));
}

std::vector<CodingDistribution> FactorizedPrior::coding_tables() const {
  std::vector<CodingDistribution> tables;
  tables.reserve(channels_);
  const int count = kSymbolMax - kSymbolMin + 1;
  std::vector<double> raw(count);
  for (int c = 0; c < channels_; ++c) {
    int first = -1;
    int last = -1;
    int best = 0;
    for (int k = 0; k < count; ++k) {
      raw[k] = pmf(c, kSymbolMin + k);
      if (raw[k] >= kPriorTailMass) {
        if (first < 0) first = k;
        last = k;
      }
      if (raw[k] > raw[best]) best = k;
    }
    if (first < 0) first = last = best;
    std::vector<double> p;
    double covered = 0.0;
    for (int k = first; k <= last; ++k) {
      covered += raw[k];
      p.push_back(std::max(kLikelihoodFloor, raw[k]));
    }
    p.push_back(std::max(kLikelihoodFloor, 1.0 - covered));
    p = normalized(std::move(p));
    tables.push_back(quantize_distribution(
        kSymbolMin + first, std::span(p).first(p.size() - 1), p.back()));
  }
  return tables;
}

LdrEntropyModel::LdrEntropyModel(ParamStore& store, const NetworkConfig& cfg,
                                 Rng& rng)
    : latent_channels_(cfg.ldr_latent_channels),
      hyper_channels_(cfg.base_channels) {
  const int m = latent_channels_;
  const int n = cfg.base_channels;
  const int mid = std::max(1, 3 * m / 2);
  ha1_ = Conv2d(store, "hyper_analysis.conv1", m, n, 3, 1, rng, 1.4);
  ha2_ = Conv2d(store, "hyper_analysis.conv2", n, n, 3, 2, rng, 1.4);
  ha3_ = Conv2d(store, "hyper_analysis.conv3", n, hyper_channels_, 3, 2, rng);
  hs1_ = Conv2d(store, "hyper_synthesis.conv1", hyper_channels_, n, 3, 1, rng,
                1.4);
  hs2_ = Upsample(store, "hyper_synthesis.up1", n, n, rng);
  hs3_ = Upsample(store, "hyper_synthesis.up2", n, mid, rng);
  hs4_ = Conv2d(store, "hyper_synthesis.conv2", mid, 2 * m, 3, 1, rng);
  context_ = ContextModel(store, "ldr_context", m, 2 * m, rng);
  params_ = ParameterNet(store, "ldr_params", 4 * m, m, rng);
  prior_ = FactorizedPrior(store, "ldr_prior", hyper_channels_, rng);
}

ag::Var LdrEntropyModel::hyper_analysis(const ag::Var& y) const {
  if (y.shape().c != latent_channels_)
    throw ShapeError("hyper analysis channel mismatch");
  return ha3_(ag::gelu(ha2_(ag::gelu(ha1_(y)))));
}

ag::Var LdrEntropyModel::hyper_synthesis(const ag::Var& z_hat, int h,
                                         int w) const {
  if (z_hat.shape().c != hyper_channels_) {
    throw ShapeError("hyper synthesis channel mismatch");
  }
  const ag::Var psi =
      hs4_(ag::gelu(hs3_(ag::gelu(hs2_(ag::gelu(hs1_(z_hat)))))));
  if (psi.shape().h < h || psi.shape().w < w) {
    throw ShapeError("hyper latent too small for the latent extent");
  }
  if (psi.shape().h == h && psi.shape().w == w) return psi;
  return ag::crop(psi, 0, 0, h, w);
}

EntropyParams LdrEntropyModel::params(const ag::Var& psi,
                                      const ag::Var& ctx) const {
  if (psi.shape().h != ctx.shape().h || psi.shape().w != ctx.shape().w) {
    throw ShapeError("hyper features and context differ in extent");
  }
  return split_params(params_(ag::concat_channels({psi, ctx})),
                      latent_channels_);
}

Shape LdrEntropyModel::hyper_shape(const Shape& y_shape) const {
  return Shape{1, hyper_channels_, (y_shape.h + 3) / 4, (y_shape.w + 3) / 4};
}

LdrRate LdrEntropyModel::forward(const ag::Var& y, Rng* rng) const {
  LdrRate r;
  const ag::Var z = hyper_analysis(y);
  if (rng != nullptr) {
    r.y_hat = noise_proxy(y, *rng);
    r.z_hat = noise_proxy(z, *rng);
  } else {
    r.y_hat = ag::constant(quantize(y.value()));
    r.z_hat = ag::constant(quantize(z.value()));
  }
  const ag::Var psi = hyper_synthesis(r.z_hat, y.shape().h, y.shape().w);
  const EntropyParams p = params(psi, context_(r.y_hat));
  r.bits_y = bits(gaussian_likelihood(r.y_hat, p.mu, p.sigma));
  r.bits_z = bits(prior_.likelihood(r.z_hat));
  return r;
}

double LdrEntropyModel::rate(const Tensor& y_bar, const Tensor& z_bar) const {
  ag::NoGradGuard guard;
  const ag::Var y = ag::constant(y_bar);
  const ag::Var z = ag::constant(z_bar);
  const ag::Var psi = hyper_synthesis(z, y_bar.shape().h, y_bar.shape().w);
  const EntropyParams p = params(psi, context_(y));
  return bits(gaussian_likelihood(y, p.mu, p.sigma)).item() +
         bits(prior_.likelihood(z)).item();
}

PmfProvider LdrEntropyModel::provider(const Shape& y_shape) const {
  struct State {
    Shape ys;
    Shape zs;
    std::vector<CodingDistribution> tables;
    Tensor y_work;
    Tensor psi;
    std::vector<double> feats;
    std::vector<double> raw;
  };
  check_latent_shape(y_shape);
  auto st = std::make_shared<State>();
  st->ys = y_shape;
  st->zs = hyper_shape(y_shape);
  st->tables = prior_.coding_tables();
  st->y_work = Tensor(y_shape);
  const int m = latent_channels_;
  st->feats.resize(4 * m);
  st->raw.resize(2 * m);
  return [this, st, m](
             std::size_t index,
             std::span<const std::int32_t> history) -> CodingDistribution {
    const std::size_t nz = st->zs.size();
    if (index < nz) return st->tables[index / st->zs.plane()];
    if (index == nz) {
      Tensor z(st->zs);
      for (std::size_t k = 0; k < nz; ++k) z[k] = history[k];
      ag::NoGradGuard guard;
      st->psi = hyper_synthesis(ag::constant(std::move(z)), st->ys.h, st->ys.w)
                    .value();
    }
    const std::size_t k = index - nz;
    const std::size_t pos = k / m;
    const int c = static_cast<int>(k % m);
    if (c == 0) {
      if (pos > 0) write_position(st->y_work, history.subspan(nz), pos - 1);
      const int i = static_cast<int>(pos) / st->ys.w;
      const int j = static_cast<int>(pos) % st->ys.w;
      for (int q = 0; q < 2 * m; ++q) st->feats[q] = st->psi.at(0, q, i, j);
      context_.at(st->y_work, i, j, std::span(st->feats).subspan(2 * m));
      params_.at(st->feats, st->raw);
    }
    return gaussian_distribution(st->raw[c], sigma_from_raw(st->raw[m + c]));
  };
}

std::vector<std::uint8_t> LdrEntropyModel::encode(const Tensor& y_bar,
                                                  const Tensor& z_bar) const {
  check_latent_shape(y_bar.shape());
  if (y_bar.shape().c != latent_channels_ ||
      !(z_bar.shape() == hyper_shape(y_bar.shape()))) {
    throw ShapeError("latent shapes do not match the entropy model");
  }
  std::vector<std::int32_t> symbols = to_symbols(z_bar);
  const std::vector<std::int32_t> ys = raster_symbols(y_bar);
  symbols.insert(symbols.end(), ys.begin(), ys.end());
  return range_encode(symbols, provider(y_bar.shape()));
}

LdrEntropyModel::Decoded LdrEntropyModel::decode(
    std::span<const std::uint8_t> bytes, const Shape& y_shape) const {
  check_latent_shape(y_shape);
  if (y_shape.c != latent_channels_)
    throw ShapeError("latent channel mismatch");
  const Shape zs = hyper_shape(y_shape);
  const std::vector<std::int32_t> symbols =
      range_decode(bytes, zs.size() + y_shape.size(), provider(y_shape));
  Decoded out{Tensor(y_shape), Tensor(zs)};
  for (std::size_t k = 0; k < zs.size(); ++k) out.z_bar[k] = symbols[k];
  const auto ys = std::span(symbols).subspan(zs.size());
  for (std::size_t pos = 0; pos < y_shape.plane(); ++pos) {
    write_position(out.y_bar, ys, pos);
  }
  return out;
}

HdrEntropyModel::HdrEntropyModel(ParamStore& store, const NetworkConfig& cfg,
                                 Rng& rng)
    : latent_channels_(cfg.hdr_latent_channels), use_context_(cfg.hdr_context) {
  const int c = latent_channels_;
  if (use_context_) {
    context_ = ContextModel(store, "hdr_context", c, 2 * c, rng);
    params_ = ParameterNet(store, "hdr_params", 2 * c, c, rng);
  }
  bias_ = store.create_constant("hdr_bias", Shape{1, 2 * c, 1, 1}, 0.0);
}

EntropyParams HdrEntropyModel::params(const ag::Var& y_hat) const {
  if (y_hat.shape().c != latent_channels_)
    throw ShapeError("HDR latent channel mismatch");
  if (!use_context_) return split_params(bias_, latent_channels_);
  return split_params(ag::add(params_(context_(y_hat)), bias_),
                      latent_channels_);
}

HdrRate HdrEntropyModel::forward(const ag::Var& y, Rng* rng) const {
  HdrRate r;
  r.y_hat =
      rng != nullptr ? noise_proxy(y, *rng) : ag::constant(quantize(y.value()));
  const EntropyParams p = params(r.y_hat);
  r.bits_y = bits(gaussian_likelihood(r.y_hat, p.mu, p.sigma));
  return r;
}

double HdrEntropyModel::rate(const Tensor& y_bar) const {
  ag::NoGradGuard guard;
  const ag::Var y = ag::constant(y_bar);
  const EntropyParams p = params(y);
  return bits(gaussian_likelihood(y, p.mu, p.sigma)).item();
}

PmfProvider HdrEntropyModel::provider(const Shape& y_shape) const {
  struct State {
    Shape ys;
    Tensor y_work;
    std::vector<double> ctx;
    std::vector<double> raw;
  };
  check_latent_shape(y_shape);
  auto st = std::make_shared<State>();
  st->ys = y_shape;
  st->y_work = Tensor(y_shape);
  const int m = latent_channels_;
  st->ctx.resize(2 * m);
  st->raw.resize(2 * m);
  return [this, st, m](
             std::size_t index,
             std::span<const std::int32_t> history) -> CodingDistribution {
    const std::size_t pos = index / m;
    const int c = static_cast<int>(index % m);
    if (c == 0) {
      const Tensor& b = bias_.value();
      if (use_context_) {
        if (pos > 0) write_position(st->y_work, history, pos - 1);
        const int i = static_cast<int>(pos) / st->ys.w;
        const int j = static_cast<int>(pos) % st->ys.w;
        context_.at(st->y_work, i, j, st->ctx);
        params_.at(st->ctx, st->raw);
        for (int q = 0; q < 2 * m; ++q) st->raw[q] += b[q];
      } else {
        for (int q = 0; q < 2 * m; ++q) st->raw[q] = b[q];
      }
    }
    return gaussian_distribution(st->raw[c], sigma_from_raw(st->raw[m + c]));
  };
}

std::vector<std::uint8_t> HdrEntropyModel::encode(const Tensor& y_bar) const {
  check_latent_shape(y_bar.shape());
  if (y_bar.shape().c != latent_channels_)
    throw ShapeError("HDR latent channel mismatch");
  return range_encode(raster_symbols(y_bar), provider(y_bar.shape()));
}

Tensor HdrEntropyModel::decode(std::span<const std::uint8_t> bytes,
                               const Shape& y_shape) const {
  check_latent_shape(y_shape);
  if (y_shape.c != latent_channels_)
    throw ShapeError("HDR latent channel mismatch");
  const std::vector<std::int32_t> symbols =
      range_decode(bytes, y_shape.size(), provider(y_shape));
  Tensor out(y_shape);
  for (std::size_t pos = 0; pos < y_shape.plane(); ++pos) {
    write_position(out, symbols, pos);
  }
  return out;
}

}  // namespace hdrc
