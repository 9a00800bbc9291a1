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

#include "hdrc/networks.h"

#include <cmath>

#include "hdrc/errors.h"
#include "hdrc/ops.h"

namespace hdrc {
namespace {

// mu-law companding of the linear radiance fed to the analysis transforms.
constexpr double kCompandMu = 5000.0;
// Initial output level of the reconstruction, near the mean of pre-processed
// scenes.
constexpr double kReconstructionInitLevel = 0.05;

ag::Var compand(const ag::Var& x) {
  return ag::mul_scalar(
      ag::log(ag::add_scalar(ag::mul_scalar(x, kCompandMu), 1.0)),
      1.0 / std::log1p(kCompandMu));
}

bool attention_at(const NetworkConfig& cfg, int stage) {
  return cfg.attention && stage >= cfg.num_down_stages - 2;
}

void require_channels(const ag::Var& x, int channels, const char* what) {
  if (x.shape().c != channels) {
    throw ShapeError(std::string(what) + ": expected " +
                     std::to_string(channels) + " channels, got " +
                     x.shape().str());
  }
}

ag::Var crop_to(const ag::Var& x, int h, int w) {
  if (x.shape().h == h && x.shape().w == w) return x;
  return ag::crop(x, 0, 0, h, w);
}

}  // namespace

void NetworkConfig::validate() const {
  if (base_channels < 1 || ldr_latent_channels < 1 || hdr_latent_channels < 1 ||
      embed_dim < 1) {
    throw ParameterError("network channel counts must be positive");
  }
  if (num_down_stages < 1 || num_down_stages > 12) {
    throw ParameterError("num_down_stages must be in [1, 12]");
  }
  if (embed_dim % 2 != 0) throw ParameterError("embed_dim must be even");
}

nlohmann::json to_json(const NetworkConfig& cfg) {
  return {{"base_channels", cfg.base_channels},
          {"ldr_latent_channels", cfg.ldr_latent_channels},
          {"hdr_latent_channels", cfg.hdr_latent_channels},
          {"num_down_stages", cfg.num_down_stages},
          {"embed_dim", cfg.embed_dim},
          {"attention", cfg.attention},
          {"hdr_context", cfg.hdr_context}};
}

NetworkConfig network_config_from_json(const nlohmann::json& j,
                                       const NetworkConfig& base) {
  if (!j.is_object()) throw FormatError("network config must be a JSON object");
  NetworkConfig cfg = base;
  cfg.base_channels = j.value("base_channels", cfg.base_channels);
  cfg.ldr_latent_channels =
      j.value("ldr_latent_channels", cfg.ldr_latent_channels);
  cfg.hdr_latent_channels =
      j.value("hdr_latent_channels", cfg.hdr_latent_channels);
  cfg.num_down_stages = j.value("num_down_stages", cfg.num_down_stages);
  cfg.embed_dim = j.value("embed_dim", cfg.embed_dim);
  cfg.attention = j.value("attention", cfg.attention);
  cfg.hdr_context = j.value("hdr_context", cfg.hdr_context);
  cfg.validate();
  return cfg;
}

std::vector<double> sinusoidal_features(double l_max, int embed_dim) {
  if (!(l_max > 0) || !std::isfinite(l_max)) {
    throw ParameterError("maximum luminance must be positive and finite");
  }
  if (embed_dim < 2 || embed_dim % 2 != 0) {
    throw ParameterError("embed_dim must be even and at least 2");
  }
  const int half = embed_dim / 2;
  const double t = std::log10(l_max);
  std::vector<double> v(embed_dim);
  for (int i = 0; i < half; ++i) {
    const double omega = half > 1 ? std::pow(10.0, -4.0 * i / (half - 1)) : 1.0;
    v[i] = std::sin(t * omega);
    v[half + i] = std::cos(t * omega);
  }
  return v;
}

PaddedSize padded_size(int height, int width, int alignment) {
  PaddedSize p;
  p.height = (height + alignment - 1) / alignment * alignment;
  p.width = (width + alignment - 1) / alignment * alignment;
  p.pad_h = p.height - height;
  p.pad_w = p.width - width;
  return p;
}

ag::Var pad_to_alignment(const ag::Var& x, int alignment) {
  const PaddedSize p = padded_size(x.shape().h, x.shape().w, alignment);
  if (p.pad_h == 0 && p.pad_w == 0) return x;
  return ag::pad_mirror(x, 0, 0, p.height, p.width);
}

LuminanceEmbedder::LuminanceEmbedder(ParamStore& store, int embed_dim, Rng& rng)
    : embed_dim_(embed_dim),
      fc1_(store, "embed.fc1", embed_dim, embed_dim, 1, 1, rng, 1.4),
      fc2_(store, "embed.fc2", embed_dim, embed_dim, 1, 1, rng) {}

ag::Var LuminanceEmbedder::operator()(std::span<const double> l_max) const {
  const int n = static_cast<int>(l_max.size());
  Tensor feats(Shape{n, embed_dim_, 1, 1});
  for (int b = 0; b < n; ++b) {
    const std::vector<double> v = sinusoidal_features(l_max[b], embed_dim_);
    for (int i = 0; i < embed_dim_; ++i) feats.at(b, i, 0, 0) = v[i];
  }
  return fc2_(ag::gelu(fc1_(ag::constant(std::move(feats)))));
}

AnalysisTransform::AnalysisTransform(ParamStore& store, const std::string& name,
                                     const NetworkConfig& cfg,
                                     int latent_channels, Rng& rng) {
  const int n = cfg.base_channels;
  for (int s = 0; s < cfg.num_down_stages; ++s) {
    const std::string stage = name + ".stage" + std::to_string(s);
    down_.emplace_back(store, stage + ".down", s == 0 ? 3 : n, n, 3, 2, rng,
                       1.4);
    blocks_.emplace_back(store, stage + ".res", n, rng);
    const bool attn = attention_at(cfg, s);
    has_attention_.push_back(attn);
    attention_.push_back(attn ? AttentionBlock(store, stage + ".attn", n, rng)
                              : AttentionBlock());
  }
  out_ = Conv2d(store, name + ".out", n, latent_channels, 3, 1, rng);
}

ag::Var AnalysisTransform::operator()(const ag::Var& x) const {
  require_channels(x, 3, "analysis input");
  ag::Var h = compand(x);
  for (std::size_t s = 0; s < down_.size(); ++s) {
    h = blocks_[s](ag::gelu(down_[s](h)));
    if (has_attention_[s]) h = attention_[s](h);
  }
  return out_(h);
}

LdrSynthesis::LdrSynthesis(ParamStore& store, const NetworkConfig& cfg,
                           Rng& rng)
    : channels_(cfg.base_channels) {
  const int n = cfg.base_channels;
  const int stages = cfg.num_down_stages;
  in_ = Conv2d(store, "ldr_synthesis.in", cfg.ldr_latent_channels, n, 3, 1, rng,
               1.4);
  for (int s = 0; s < stages; ++s) {
    const std::string stage = "ldr_synthesis.stage" + std::to_string(s);
    // Stage s runs at the (stages - s)-th deepest scale.
    const bool attn = attention_at(cfg, stages - 1 - s);
    has_attention_.push_back(attn);
    attention_.push_back(attn ? AttentionBlock(store, stage + ".attn", n, rng)
                              : AttentionBlock());
    blocks_.emplace_back(store, stage + ".res", n, rng);
    film_.emplace_back(store, stage + ".film", cfg.embed_dim, 2 * n, 1, 1, rng,
                       0.1);
    up_.emplace_back(store, stage + ".up", n, s + 1 == stages ? 3 : n, rng);
  }
}

ag::Var LdrSynthesis::operator()(const ag::Var& y,
                                 const ag::Var& embedding) const {
  ag::Var h = ag::gelu(in_(y));
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    if (has_attention_[s]) h = attention_[s](h);
    h = blocks_[s](h);
    const ag::Var film = film_[s](embedding);
    const ag::Var scale =
        ag::add_scalar(ag::slice_channels(film, 0, channels_), 1.0);
    const ag::Var shift = ag::slice_channels(film, channels_, 2 * channels_);
    h = ag::add(ag::mul(h, scale), shift);
    h = up_[s](h);
    if (s + 1 < blocks_.size()) h = ag::gelu(h);
  }
  return ag::sigmoid(h);
}

std::vector<int> HdrSynthesis::channel_counts(int base_channels) {
  auto half = [](int c) {
    return std::max(1, static_cast<int>(std::lround(c / 2.0)));
  };
  return {base_channels, half(base_channels), half(half(base_channels))};
}

HdrSynthesis::HdrSynthesis(ParamStore& store, const NetworkConfig& cfg,
                           Rng& rng)
    : stages_(cfg.num_down_stages) {
  const std::vector<int> c = channel_counts(cfg.base_channels);
  in_ = Conv2d(store, "hdr_synthesis.in", cfg.hdr_latent_channels, c[0], 3, 1,
               rng, 1.4);
  for (int s = stages_; s > 2; --s) {
    const std::string stage = "hdr_synthesis.up" + std::to_string(s);
    up_blocks_.emplace_back(store, stage + ".res", c[0], rng);
    up_.emplace_back(store, stage, c[0], c[0], rng);
  }
  for (int s = stages_; s < 2; ++s) {
    down_.emplace_back(store, "hdr_synthesis.down" + std::to_string(s), c[0],
                       c[0], 3, 2, rng, 1.4);
  }
  half_ = Upsample(store, "hdr_synthesis.half", c[0], c[1], rng);
  full_ = Upsample(store, "hdr_synthesis.full", c[1], c[2], rng);
}

FeatureMaps HdrSynthesis::operator()(const ag::Var& y) const {
  const int full_h = y.shape().h << stages_;
  const int full_w = y.shape().w << stages_;
  ag::Var h = ag::gelu(in_(y));
  for (std::size_t i = 0; i < up_.size(); ++i)
    h = ag::gelu(up_[i](up_blocks_[i](h)));
  for (const Conv2d& d : down_) h = ag::gelu(d(h));
  FeatureMaps f;
  f.scales.push_back(h);
  const ag::Var f1 =
      crop_to(ag::gelu(half_(h)), (full_h + 1) / 2, (full_w + 1) / 2);
  f.scales.push_back(f1);
  f.scales.push_back(crop_to(ag::gelu(full_(f1)), full_h, full_w));
  return f;
}

ReconstructionNet::ReconstructionNet(ParamStore& store,
                                     const NetworkConfig& cfg, Rng& rng) {
  const std::vector<int> c = HdrSynthesis::channel_counts(cfg.base_channels);
  const std::string p = "reconstruction.";
  enc0_ = Conv2d(store, p + "enc0", 3 + c[2], c[2], 3, 1, rng, 1.4);
  down1_ = Conv2d(store, p + "down1", c[2], c[1], 3, 2, rng, 1.4);
  fuse1_ = Conv2d(store, p + "fuse1", 2 * c[1], c[1], 3, 1, rng, 1.4);
  down2_ = Conv2d(store, p + "down2", c[1], c[0], 3, 2, rng, 1.4);
  fuse2_ = Conv2d(store, p + "fuse2", 2 * c[0], c[0], 3, 1, rng, 1.4);
  mid_ = ResidualBlock(store, p + "mid", c[0], rng);
  up1_ = Upsample(store, p + "up1", c[0], c[1], rng);
  dec1_ = Conv2d(store, p + "dec1", 2 * c[1], c[1], 3, 1, rng, 1.4);
  up0_ = Upsample(store, p + "up0", c[1], c[2], rng);
  dec0_ = Conv2d(store, p + "dec0", 2 * c[2], c[2], 3, 1, rng, 1.4);
  out_ = Conv2d(store, p + "out", c[2], 3, 3, 1, rng);
  Tensor& bias = out_.bias().mutable_value();
  for (std::size_t i = 0; i < bias.size(); ++i) {
    bias[i] = std::log(std::expm1(kReconstructionInitLevel));
  }
}

ag::Var ReconstructionNet::operator()(const ag::Var& ldr,
                                      const FeatureMaps& features) const {
  if (features.scales.size() != 3) {
    throw ShapeError("reconstruction expects feature maps at 3 scales");
  }
  const Shape& s0 = features.scales[0].shape();
  const Shape& s1 = features.scales[1].shape();
  const Shape& s2 = features.scales[2].shape();
  if (s1.h != (s2.h + 1) / 2 || s1.w != (s2.w + 1) / 2 ||
      s0.h != (s1.h + 1) / 2 || s0.w != (s1.w + 1) / 2) {
    throw ShapeError("feature map scales are not aligned");
  }
  require_channels(ldr, 3, "reconstruction input");
  const int h = ldr.shape().h;
  const int w = ldr.shape().w;
  if (h > s2.h || w > s2.w || ldr.shape().n != s2.n) {
    throw ShapeError("LDR image " + ldr.shape().str() +
                     " does not match side information " + s2.str());
  }
  const ag::Var x = ag::pad_mirror(ldr, 0, 0, s2.h, s2.w);
  const ag::Var e0 =
      ag::gelu(enc0_(ag::concat_channels({x, features.scales[2]})));
  ag::Var e1 = ag::gelu(down1_(e0));
  e1 = ag::gelu(fuse1_(ag::concat_channels({e1, features.scales[1]})));
  ag::Var e2 = ag::gelu(down2_(e1));
  e2 = mid_(ag::gelu(fuse2_(ag::concat_channels({e2, features.scales[0]}))));
  ag::Var d1 = crop_to(ag::gelu(up1_(e2)), s1.h, s1.w);
  d1 = ag::gelu(dec1_(ag::concat_channels({d1, e1})));
  ag::Var d0 = crop_to(ag::gelu(up0_(d1)), s2.h, s2.w);
  d0 = ag::gelu(dec0_(ag::concat_channels({d0, e0})));
  return crop_to(ag::softplus(out_(d0)), h, w);
}

Transforms::Transforms(ParamStore& store, const NetworkConfig& cfg, Rng& rng)
    : config(cfg) {
  cfg.validate();
  embedder = LuminanceEmbedder(store, cfg.embed_dim, rng);
  ldr_analysis = AnalysisTransform(store, "ldr_analysis", cfg,
                                   cfg.ldr_latent_channels, rng);
  hdr_analysis = AnalysisTransform(store, "hdr_analysis", cfg,
                                   cfg.hdr_latent_channels, rng);
  ldr_synthesis = LdrSynthesis(store, cfg, rng);
  hdr_synthesis = HdrSynthesis(store, cfg, rng);
  reconstruction = ReconstructionNet(store, cfg, rng);
}

LuminanceEmbedding luminance_embedding(const Transforms& t, double l_max) {
  ag::NoGradGuard guard;
  const double lm[1] = {l_max};
  const ag::Var e = t.embedder(lm);
  LuminanceEmbedding out;
  out.vector.assign(e.value().values().begin(), e.value().values().end());
  return out;
}

namespace {

LatentTensor run_analysis(const AnalysisTransform& a, const NetworkConfig& cfg,
                          const HdrImage& s) {
  if (s.pixels.empty()) throw ShapeError("cannot analyse an empty image");
  ag::NoGradGuard guard;
  const ag::Var x =
      pad_to_alignment(ag::constant(s.pixels.to_tensor()), cfg.alignment());
  LatentTensor out;
  out.values = a(x).value();
  return out;
}

void require_latent(const LatentTensor& y, int channels) {
  if (y.values.shape().c != channels || y.values.shape().n != 1) {
    throw ShapeError("latent has shape " + y.values.shape().str() +
                     ", expected " + std::to_string(channels) + " channels");
  }
}

}  // namespace

LatentTensor analysis_ldr(const Transforms& t, const HdrImage& s) {
  return run_analysis(t.ldr_analysis, t.config, s);
}

LatentTensor analysis_hdr(const Transforms& t, const HdrImage& s) {
  return run_analysis(t.hdr_analysis, t.config, s);
}

LdrImage synthesis_ldr(const Transforms& t, const LatentTensor& y, double l_max,
                       int out_height, int out_width) {
  require_latent(y, t.config.ldr_latent_channels);
  ag::NoGradGuard guard;
  const double lm[1] = {l_max};
  const ag::Var v = t.ldr_synthesis(ag::constant(y.values), t.embedder(lm));
  if (out_height < 1 || out_width < 1 || out_height > v.shape().h ||
      out_width > v.shape().w) {
    throw ShapeError("requested output size exceeds the synthesised extent");
  }
  LdrImage out;
  out.pixels = Image::from_tensor(crop_to(v, out_height, out_width).value());
  return out;
}

FeatureMaps synthesis_hdr(const Transforms& t, const LatentTensor& y) {
  require_latent(y, t.config.hdr_latent_channels);
  ag::NoGradGuard guard;
  return t.hdr_synthesis(ag::constant(y.values));
}

HdrImage reconstruct(const Transforms& t, const LdrImage& ldr,
                     const FeatureMaps& features) {
  ag::NoGradGuard guard;
  const ag::Var s =
      t.reconstruction(ag::constant(ldr.pixels.to_tensor()), features);
  HdrImage out;
  out.pixels = Image::from_tensor(s.value());
  return out;
}

}  // namespace hdrc
