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

#ifndef HDRC_DISPLAY_MODEL_H_
#define HDRC_DISPLAY_MODEL_H_

#include <optional>
#include <span>
#include <vector>

#include "hdrc/autograd.h"
#include "hdrc/image.h"

namespace hdrc {

// Gamma display: L = (l_max - l_min) * V^gamma + l_min, in cd/m^2.
struct DisplayModel {
  double l_min = 1.0;
  double l_max = 300.0;
  double gamma = 2.2;

  void validate() const;
};

struct ExposureStack {
  std::vector<double> exposures;  // strictly increasing, positive
  std::vector<LdrImage> frames;
};

// Luminance (cd/m^2) emitted for display-encoded V, using the luminance of V.
Plane display_render(const LdrImage& v, const DisplayModel& model = {});
double display_render_value(double v, const DisplayModel& model = {});
// [N, 3, H, W] -> [N, 1, H, W], differentiable.
ag::Var display_render(const ag::Var& v, const DisplayModel& model = {});

// frame_k = clip(S * l_max_scene / e_k, 0, 1)^(1 / gamma), per channel.
ExposureStack decompose_exposures(const HdrImage& s, double l_max_scene,
                                  std::span<const double> exposures,
                                  const DisplayModel& model = {});
LdrImage expose(const Image& s, double l_max_scene, double exposure,
                const DisplayModel& model = {});
// Differentiable single exposure. `ratio` is l_max_scene / e_k per batch item
// (shape [N, 1, 1, 1]).
ag::Var expose(const ag::Var& s, const ag::Var& ratio,
               const DisplayModel& model = {});

// Exposures at percentiles of the calibrated luminance S * l_max_scene over
// positive-luminance pixels. Default percentiles are K values uniformly spaced
// on [10, 90]; an explicit list overrides them. Ties are broken upward by one
// ulp; the result is strictly increasing.
std::vector<double> choose_exposures(
    const HdrImage& s, double l_max_scene, int k,
    std::optional<std::vector<double>> percentiles = std::nullopt);

std::vector<double> default_percentiles(int k);

// Linear-interpolated percentile (p in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

}  // namespace hdrc

#endif  // HDRC_DISPLAY_MODEL_H_
