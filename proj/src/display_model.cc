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

#include "hdrc/display_model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/ops.h"

namespace hdrc {

void DisplayModel::validate() const {
  if (!(l_min > 0 && l_min < l_max)) {
    throw ParameterError("display model needs 0 < l_min < l_max");
  }
  if (!(gamma > 0)) throw ParameterError("display gamma must be positive");
}

double display_render_value(double v, const DisplayModel& model) {
  return (model.l_max - model.l_min) * std::pow(v, model.gamma) + model.l_min;
}

Plane display_render(const LdrImage& v, const DisplayModel& model) {
  model.validate();
  Plane lum = luminance(v.pixels);
  for (double& x : lum.data) x = display_render_value(x, model);
  return lum;
}

ag::Var display_render(const ag::Var& v, const DisplayModel& model) {
  model.validate();
  static constexpr double kWeights[3] = {kLumaR, kLumaG, kLumaB};
  const ag::Var y = ag::channel_mix(v, kWeights);
  return ag::add_scalar(
      ag::mul_scalar(ag::pow_scalar(y, model.gamma), model.l_max - model.l_min),
      model.l_min);
}

LdrImage expose(const Image& s, double l_max_scene, double exposure,
                const DisplayModel& model) {
  if (!(exposure > 0)) throw ParameterError("exposure must be positive");
  LdrImage out;
  out.pixels = Image(s.height(), s.width());
  // Calibration and exposure folded into one factor.
  const double ratio = l_max_scene / exposure;
  const double inv_gamma = 1.0 / model.gamma;
  auto& dst = out.pixels.data();
  const auto& src = s.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double x = std::clamp(src[i] * ratio, 0.0, 1.0);
    dst[i] = x > 0 ? std::pow(x, inv_gamma) : 0.0;
  }
  return out;
}

ag::Var expose(const ag::Var& s, const ag::Var& ratio,
               const DisplayModel& model) {
  return ag::pow_scalar(ag::clamp(ag::mul(s, ratio), 0.0, 1.0),
                        1.0 / model.gamma);
}

ExposureStack decompose_exposures(const HdrImage& s, double l_max_scene,
                                  std::span<const double> exposures,
                                  const DisplayModel& model) {
  model.validate();
  if (exposures.empty()) throw ParameterError("need at least one exposure");
  ExposureStack stack;
  for (std::size_t k = 0; k < exposures.size(); ++k) {
    if (!(exposures[k] > 0)) throw ParameterError("exposures must be positive");
    if (k > 0 && !(exposures[k] > exposures[k - 1])) {
      throw ParameterError("exposures must be strictly increasing");
    }
    stack.exposures.push_back(exposures[k]);
    stack.frames.push_back(expose(s.pixels, l_max_scene, exposures[k], model));
  }
  return stack;
}

std::vector<double> default_percentiles(int k) {
  if (k < 1) throw ParameterError("K must be at least 1");
  if (k == 1) return {50.0};
  std::vector<double> p(k);
  for (int i = 0; i < k; ++i) p[i] = 10.0 + 80.0 * i / (k - 1);
  return p;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DegenerateInputError("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> choose_exposures(
    const HdrImage& s, double l_max_scene, int k,
    std::optional<std::vector<double>> percentiles) {
  if (!(l_max_scene > 0))
    throw ParameterError("scene luminance must be positive");
  const std::vector<double> ps =
      percentiles ? *percentiles : default_percentiles(k);
  if (ps.empty()) throw ParameterError("need at least one percentile");
  const Plane lum = luminance(s.pixels);
  std::vector<double> positive;
  positive.reserve(lum.data.size());
  for (double v : lum.data) {
    if (v > 0) positive.push_back(v * l_max_scene);
  }
  if (positive.empty()) {
    throw DegenerateInputError(
        "no positive-luminance pixels to choose exposures");
  }
  std::sort(positive.begin(), positive.end());
  std::vector<double> out;
  for (double p : ps) {
    double e = percentile(positive, p);
    if (!out.empty() && !(e > out.back())) {
      e = std::nextafter(out.back(), std::numeric_limits<double>::infinity());
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace hdrc
