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

#include "hdrc/metrics.h"

#include <algorithm>
#include <cmath>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/ops.h"
#include "json.hpp"

namespace hdrc {
namespace {

constexpr double kBinomial[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                 1.0 / 16};
constexpr double kBinomialUp[5] = {2.0 / 16, 8.0 / 16, 12.0 / 16, 8.0 / 16,
                                   2.0 / 16};
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr int kSsimTaps = 11;
constexpr double kSsimSigma = 1.5;

std::vector<double> gaussian_taps(int n, double sigma) {
  std::vector<double> t(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - (n - 1) / 2.0;
    t[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    total += t[i];
  }
  for (double& v : t) v /= total;
  return t;
}

Tensor plane_tensor(const Plane& p) {
  return Tensor(Shape{1, 1, p.height, p.width}, p.data);
}

Plane tensor_plane(const Tensor& t) {
  Plane p(t.shape().h, t.shape().w);
  std::copy(t.data(), t.data() + t.size(), p.data.begin());
  return p;
}

void require_same_size(const Image& a, const Image& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError("images differ in size");
  }
  if (a.empty()) throw ShapeError("empty image");
}

}  // namespace

void NlpdConfig::validate() const {
  if (levels < 1) throw ParameterError("NLPD needs at least one level");
  if (!(alpha > 0) || !(beta > 0))
    throw ParameterError("NLPD alpha, beta must be positive");
  if (!(dn_sigma > 0)) throw ParameterError("NLPD sigma must be positive");
  for (double v : dn_filter) {
    if (v < 0) throw ParameterError("NLPD filter must be non-negative");
  }
}

int NlpdConfig::effective_levels(int height, int width) const {
  int size = std::min(height, width);
  int m = 1;
  while (m < levels) {
    size = (size + 1) / 2;
    if (size < min_band_size) break;
    ++m;
  }
  return m;
}

std::vector<ag::Var> nlp_transform(const ag::Var& luminance,
                                   const NlpdConfig& cfg) {
  cfg.validate();
  if (luminance.shape().c != 1)
    throw ShapeError("NLP transform expects one channel");
  const int m = cfg.effective_levels(luminance.shape().h, luminance.shape().w);
  ag::Var x = ag::pow_scalar(luminance, cfg.frontend_exponent);
  std::vector<ag::Var> bands;
  for (int i = 0; i < m; ++i) {
    ag::Var band = x;
    if (i + 1 < m) {
      const ag::Var down = ag::downsample2(ag::filter_separable(x, kBinomial));
      const ag::Var up = ag::filter_separable(
          ag::upsample2(down, x.shape().h, x.shape().w), kBinomialUp);
      band = ag::sub(x, up);
      x = down;
    }
    const ag::Var denom = ag::add_scalar(
        ag::filter2d(ag::abs(band), cfg.dn_filter, 5), cfg.dn_sigma);
    bands.push_back(ag::div(band, denom));
  }
  return bands;
}

std::vector<Plane> nlp_transform(const Plane& luminance,
                                 const NlpdConfig& cfg) {
  if (luminance.data.empty()) throw ShapeError("empty luminance map");
  for (double v : luminance.data) {
    if (!(v > 0))
      throw ParameterError("NLP transform needs positive luminance");
  }
  ag::NoGradGuard guard;
  std::vector<Plane> out;
  for (const ag::Var& b :
       nlp_transform(ag::constant(plane_tensor(luminance)), cfg)) {
    out.push_back(tensor_plane(b.value()));
  }
  return out;
}

ag::Var nlpd(const ag::Var& ref_luminance, const ag::Var& test_luminance,
             const NlpdConfig& cfg) {
  if (!(ref_luminance.shape() == test_luminance.shape())) {
    throw ShapeError("NLPD inputs differ in shape");
  }
  const std::vector<ag::Var> a = nlp_transform(ref_luminance, cfg);
  const std::vector<ag::Var> b = nlp_transform(test_luminance, cfg);
  ag::Var total = ag::scalar(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ag::Var d = ag::abs(ag::sub(a[i], b[i]));
    if (cfg.alpha != 1.0) d = ag::pow_scalar(d, cfg.alpha);
    ag::Var band = ag::mean(d);
    if (cfg.beta != cfg.alpha)
      band = ag::pow_scalar(band, cfg.beta / cfg.alpha);
    total = ag::add(total, band);
  }
  return ag::mul_scalar(total, 1.0 / static_cast<double>(a.size()));
}

double nlpd(const HdrImage& s, double l_max_scene, const LdrImage& ldr,
            const DisplayModel& display, const NlpdConfig& cfg) {
  require_same_size(s.pixels, ldr.pixels);
  if (!(l_max_scene > 0))
    throw ParameterError("scene luminance must be positive");
  Plane ref = luminance(s.pixels);
  for (double& v : ref.data) v = std::max(v * l_max_scene, kNlpdMinLuminance);
  const Plane test = display_render(ldr, display);
  ag::NoGradGuard guard;
  return nlpd(ag::constant(plane_tensor(ref)), ag::constant(plane_tensor(test)),
              cfg)
      .item();
}

double psnr(const Image& a, const Image& b) {
  require_same_size(a, b);
  double se = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data().size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

ag::Var ssim(const ag::Var& a, const ag::Var& b) {
  if (!(a.shape() == b.shape()))
    throw ShapeError("SSIM inputs differ in shape");
  static const std::vector<double> taps = gaussian_taps(kSsimTaps, kSsimSigma);
  const double c1 = kSsimK1 * kSsimK1;
  const double c2 = kSsimK2 * kSsimK2;
  auto blur = [](const ag::Var& x) { return ag::filter_separable(x, taps); };
  const ag::Var mu_a = blur(a);
  const ag::Var mu_b = blur(b);
  const ag::Var mu_aa = ag::square(mu_a);
  const ag::Var mu_bb = ag::square(mu_b);
  const ag::Var mu_ab = ag::mul(mu_a, mu_b);
  const ag::Var var_a = ag::sub(blur(ag::square(a)), mu_aa);
  const ag::Var var_b = ag::sub(blur(ag::square(b)), mu_bb);
  const ag::Var cov = ag::sub(blur(ag::mul(a, b)), mu_ab);
  const ag::Var num = ag::mul(ag::add_scalar(ag::mul_scalar(mu_ab, 2.0), c1),
                              ag::add_scalar(ag::mul_scalar(cov, 2.0), c2));
  const ag::Var den = ag::mul(ag::add_scalar(ag::add(mu_aa, mu_bb), c1),
                              ag::add_scalar(ag::add(var_a, var_b), c2));
  return ag::mean(ag::div(num, den));
}

double ssim(const Image& a, const Image& b) {
  require_same_size(a, b);
  ag::NoGradGuard guard;
  return ssim(ag::constant(a.to_tensor()), ag::constant(b.to_tensor())).item();
}

BaseMetric psnr_metric() {
  return {"psnr", Polarity::kHigherBetter, kPsnrCap,
          [](const LdrImage& a, const LdrImage& b) {
            return psnr(a.pixels, b.pixels);
          }};
}

BaseMetric ssim_metric() {
  return {"ssim", Polarity::kHigherBetter, 1.0,
          [](const LdrImage& a, const LdrImage& b) {
            return ssim(a.pixels, b.pixels);
          }};
}

BaseMetric base_metric(const std::string& name) {
  if (name == "psnr") return psnr_metric();
  if (name == "ssim") return ssim_metric();
  throw ParameterError("unknown base metric " + name);
}

double d_H(const HdrImage& s, const HdrImage& s_hat, double l_max_scene,
           std::span<const double> exposures_ref,
           std::span<const double> exposures_test, const BaseMetric& base,
           const DisplayModel& display) {
  if (exposures_ref.size() != exposures_test.size()) {
    throw ParameterError("exposure stacks differ in length");
  }
  require_same_size(s.pixels, s_hat.pixels);
  double total = 0.0;
  for (std::size_t k = 0; k < exposures_ref.size(); ++k) {
    const LdrImage ref =
        expose(s.pixels, l_max_scene, exposures_ref[k], display);
    const LdrImage test =
        expose(s_hat.pixels, l_max_scene, exposures_test[k], display);
    total += base.evaluate(ref, test);
  }
  return total;
}

DStarResult d_H_star(const HdrImage& s, const HdrImage& s_hat,
                     double l_max_scene, std::span<const double> exposures_ref,
                     const BaseMetric& base, const DisplayModel& display) {
  require_same_size(s.pixels, s_hat.pixels);
  DStarResult result;
  for (double e : exposures_ref) {
    const LdrImage ref = expose(s.pixels, l_max_scene, e, display);
    auto score = [&](double stops) {
      return base.evaluate(ref, expose(s_hat.pixels, l_max_scene,
                                       e * std::exp2(stops), display));
    };
    const double step = 2.0 * kSearchStops / (kSearchGridPoints - 1);
    double best_t = 0.0;
    double best = score(0.0);
    for (int i = 0; i < kSearchGridPoints; ++i) {
      const double t = -kSearchStops + step * i;
      const double v = score(t);
      if (base.better(v, best)) {
        best = v;
        best_t = t;
      }
    }
    // Golden-section refinement around the best grid point; minimizes the
    // polarity-adjusted score.
    auto cost = [&](double t) {
      const double v = score(t);
      return base.polarity == Polarity::kLowerBetter ? v : -v;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(-kSearchStops, best_t - step);
    double b = std::min(kSearchStops, best_t + step);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = cost(c);
    double fd = cost(d);
    while (b - a > kSearchTolerance) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = cost(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = cost(d);
      }
    }
    const double t_ref = (a + b) / 2.0;
    const double v_ref = score(t_ref);
    if (base.better(v_ref, best)) {
      best = v_ref;
      best_t = t_ref;
    }
    result.value += best;
    result.exposures.push_back(e * std::exp2(best_t));
  }
  return result;
}

std::string to_jsonl(const MetricRecord& r) {
  const nlohmann::json j = {{"metric", r.metric},
                            {"value", r.value},
                            {"bpp", r.bpp},
                            {"image_id", r.image_id}};
  return j.dump();
}

MetricRecord metric_record_from_jsonl(const std::string& line) {
  try {
    const nlohmann::json j = nlohmann::json::parse(line);
    return {j.at("metric").get<std::string>(), j.at("value").get<double>(),
            j.at("bpp").get<double>(), j.at("image_id").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad metric record: ") + e.what());
  }
}

}  // namespace hdrc
