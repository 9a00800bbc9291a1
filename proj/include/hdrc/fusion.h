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

#ifndef HDRC_FUSION_H_
#define HDRC_FUSION_H_

#include <array>
#include <span>
#include <vector>

#include "hdrc/image.h"
#include "hdrc/model.h"
#include "hdrc/networks.h"

namespace hdrc {

// Conditioning luminances (cd/m^2) of the pseudo-multi-exposure stack.
inline constexpr std::array<double, 4> kConditioningLuminances = {1e4, 1e5, 1e6,
                                                                  1e7};

inline constexpr double kWellExposedMean = 0.5;
inline constexpr double kWellExposedSigma = 0.2;
inline constexpr double kFusionWeightFloor = 1e-12;

// Per-frame weight maps, normalized so they sum to 1 at every pixel.
struct FusionWeights {
  std::vector<Plane> weights;
};

// contrast * saturation * well-exposedness (+ a tiny floor), normalized.
FusionWeights fusion_weights(std::span<const LdrImage> frames);

// Multi-band blend over a pyramid as deep as the NLPD one, under
// fusion_weights, clipped to [0, 1]. A single frame is returned unchanged.
LdrImage exposure_fusion(std::span<const LdrImage> frames);

// Decodes the LDR latent once per conditioning luminance.
std::vector<LdrImage> pseudo_exposure_stack(const Model& model,
                                            const LatentTensor& y_bar_l,
                                            int height, int width);

}  // namespace hdrc

#endif  // HDRC_FUSION_H_
