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

#ifndef HDRC_METRICS_H_
#define HDRC_METRICS_H_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hdrc/autograd.h"
#include "hdrc/display_model.h"
#include "hdrc/image.h"

namespace hdrc {

struct NlpdConfig {
  int levels = 6;
  // Levels are dropped until the coarsest band is at least this large.
  int min_band_size = 8;
  double alpha = 1.0;
  double beta = 1.0;
  double frontend_exponent = 1.0 / 2.6;
  std::array<double, 25> dn_filter = {0.04, 0.04, 0.05, 0.04, 0.04,  //
                                      0.04, 0.03, 0.04, 0.03, 0.04,  //
                                      0.05, 0.04, 0.05, 0.04, 0.05,  //
                                      0.04, 0.03, 0.04, 0.03, 0.04,  //
                                      0.04, 0.04, 0.05, 0.04, 0.04};
  double dn_sigma = 0.17;

  void validate() const;
  int effective_levels(int height, int width) const;
};

// Floor applied to reference luminance (cd/m^2) before the NLPD front end.
inline constexpr double kNlpdMinLuminance = 1e-6;

// Normalized Laplacian pyramid of a luminance map (cd/m^2). Throws
// ParameterError on non-positive luminance.
std::vector<Plane> nlp_transform(const Plane& luminance,
                                 const NlpdConfig& cfg = {});
// Differentiable form for [N, 1, H, W] luminance.
std::vector<ag::Var> nlp_transform(const ag::Var& luminance,
                                   const NlpdConfig& cfg = {});

// Distance between normalized pyramids; batch items are pooled.
ag::Var nlpd(const ag::Var& ref_luminance, const ag::Var& test_luminance,
             const NlpdConfig& cfg = {});
// Reference luminance S * l_max_scene against the rendered LDR image.
double nlpd(const HdrImage& s, double l_max_scene, const LdrImage& ldr,
            const DisplayModel& display = {}, const NlpdConfig& cfg = {});

inline constexpr double kPsnrCap = 100.0;
double psnr(const Image& a, const Image& b);
double ssim(const Image& a, const Image& b);
// Mean SSIM over every batch item and channel.
ag::Var ssim(const ag::Var& a, const ag::Var& b);

enum class Polarity { kLowerBetter, kHigherBetter };

struct BaseMetric {
  std::string name;
  Polarity polarity = Polarity::kLowerBetter;
  double optimal = 0.0;
  std::function<double(const LdrImage&, const LdrImage&)> evaluate;

  // True when a is strictly better than b.
  bool better(double a, double b) const {
    return polarity == Polarity::kLowerBetter ? a < b : a > b;
  }
};

BaseMetric psnr_metric();
BaseMetric ssim_metric();
// Throws ParameterError for unknown names.
BaseMetric base_metric(const std::string& name);

// Sum over k of base(I^(k), I_hat^(k)).
double d_H(const HdrImage& s, const HdrImage& s_hat, double l_max_scene,
           std::span<const double> exposures_ref,
           std::span<const double> exposures_test, const BaseMetric& base,
           const DisplayModel& display = {});

struct DStarResult {
  double value = 0.0;
  std::vector<double> exposures;  // matched exposures of the test stack
};

inline constexpr double kSearchStops = 2.0;
inline constexpr int kSearchGridPoints = 17;
// Golden-section refinement tolerance, in stops.
inline constexpr double kSearchTolerance = 1e-7;

DStarResult d_H_star(const HdrImage& s, const HdrImage& s_hat,
                     double l_max_scene, std::span<const double> exposures_ref,
                     const BaseMetric& base, const DisplayModel& display = {});

struct MetricRecord {
  std::string metric;
  double value = 0.0;
  double bpp = 0.0;
  std::string image_id;
};
// One line of line-delimited JSON (no trailing newline).
std::string to_jsonl(const MetricRecord& r);
MetricRecord metric_record_from_jsonl(const std::string& line);

}  // namespace hdrc

#endif  // HDRC_METRICS_H_
