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

#ifndef HDRC_CODEC_H_
#define HDRC_CODEC_H_

#include <optional>
#include <vector>

#include "hdrc/bitstream.h"
#include "hdrc/image.h"
#include "hdrc/model.h"
#include "hdrc/networks.h"

namespace hdrc {

inline constexpr double kMinSceneLuminance = 1.0;
inline constexpr double kMaxSceneLuminance = 1e9;

struct QuantizedLatents {
  Tensor y_l;  // [1, M, h, w]
  Tensor z_l;  // hyper latent of y_l
  Tensor y_h;
};

struct CompressResult {
  Bitstream bitstream;
  QuantizedLatents latents;
  // Estimated rates of the entropy model, in bits.
  double estimated_bits_ldr = 0.0;
  double estimated_bits_hdr = 0.0;
};

// preprocess -> analysis -> quantize -> entropy coding -> container.
CompressResult compress_detailed(const HdrImage& s, const Model& model,
                                 double l_max);
Bitstream compress(const HdrImage& s, const Model& model, double l_max);

// Latent shape [1, C, h, w] of a width x height image.
Shape latent_shape(const NetworkConfig& cfg, int channels, int height,
                   int width);

// Checks the model id and header consistency, then entropy-decodes.
QuantizedLatents decode_latents(const Bitstream& b, const Model& model);

struct DecodedImage {
  LdrImage ldr;
  HdrImage hdr;
};

// LDR via synthesis conditioned on the header luminance (or `l_max`), HDR via
// reconstruction with the decoded side information.
DecodedImage decompress(const Bitstream& b, const Model& model,
                        std::optional<double> l_max = std::nullopt);

struct AutoDecoded {
  std::vector<LdrImage> stack;
  LdrImage fused;
  HdrImage hdr;
};

// Pseudo-multi-exposure stack at the fixed conditioning luminances, fused for
// display; the fused image drives the HDR reconstruction.
AutoDecoded automated_decode(const Bitstream& b, const Model& model);

// Total and side-information bits per pixel of a container.
double bits_per_pixel(const Bitstream& b);
double side_bits_per_pixel(const Bitstream& b);

}  // namespace hdrc

#endif  // HDRC_CODEC_H_
