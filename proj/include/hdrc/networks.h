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

#ifndef HDRC_NETWORKS_H_
#define HDRC_NETWORKS_H_

#include <span>
#include <vector>

#include "hdrc/autograd.h"
#include "hdrc/image.h"
#include "hdrc/layers.h"
#include "json.hpp"

namespace hdrc {

struct NetworkConfig {
  int base_channels = 48;
  int ldr_latent_channels = 64;
  int hdr_latent_channels = 32;
  int num_down_stages = 4;
  int embed_dim = 128;
  bool attention = true;
  // Rate model of the HDR latent: context-conditioned Gaussians when true,
  // per-channel Gaussians only when false.
  bool hdr_context = true;

  void validate() const;
  // Spatial multiple the analysis input is padded to.
  int alignment() const { return 1 << num_down_stages; }

  bool operator==(const NetworkConfig&) const = default;
};

nlohmann::json to_json(const NetworkConfig& cfg);
// Fields absent from `j` keep their values from `base`.
NetworkConfig network_config_from_json(const nlohmann::json& j,
                                       const NetworkConfig& base = {});

// Code array; values hold integers when quantized. Shape [1, C, h, w].
struct LatentTensor {
  Tensor values;
  bool quantized = false;
};

// Side information at 1/4, 1/2 and 1/1 of the padded image resolution.
struct FeatureMaps {
  std::vector<ag::Var> scales;
};

struct LuminanceEmbedding {
  std::vector<double> vector;
};

// Sinusoidal code of t = log10(l_max): embed_dim / 2 sines followed by as many
// cosines at frequencies 10^(-4 i / (embed_dim / 2 - 1)).
std::vector<double> sinusoidal_features(double l_max, int embed_dim);

struct PaddedSize {
  int height = 0;
  int width = 0;
  int pad_h = 0;
  int pad_w = 0;
};
PaddedSize padded_size(int height, int width, int alignment);
// Mirror-pads bottom/right of an image batch to a multiple of `alignment`.
ag::Var pad_to_alignment(const ag::Var& x, int alignment);

class LuminanceEmbedder {
 public:
  LuminanceEmbedder() = default;
  LuminanceEmbedder(ParamStore& store, int embed_dim, Rng& rng);
  // One embedding per batch item: [N, embed_dim, 1, 1].
  ag::Var operator()(std::span<const double> l_max) const;

 private:
  int embed_dim_ = 0;
  Conv2d fc1_;
  Conv2d fc2_;
};

class AnalysisTransform {
 public:
  AnalysisTransform() = default;
  AnalysisTransform(ParamStore& store, const std::string& name,
                    const NetworkConfig& cfg, int latent_channels, Rng& rng);
  // x: pre-processed radiance padded to the alignment.
  ag::Var operator()(const ag::Var& x) const;

 private:
  std::vector<Conv2d> down_;
  std::vector<ResidualBlock> blocks_;
  std::vector<AttentionBlock> attention_;  // one slot per stage, may be empty
  std::vector<bool> has_attention_;
  Conv2d out_;
};

class LdrSynthesis {
 public:
  LdrSynthesis() = default;
  LdrSynthesis(ParamStore& store, const NetworkConfig& cfg, Rng& rng);
  // Returns the padded-size display image in (0, 1).
  ag::Var operator()(const ag::Var& y, const ag::Var& embedding) const;

 private:
  int channels_ = 0;
  Conv2d in_;
  std::vector<AttentionBlock> attention_;
  std::vector<bool> has_attention_;
  std::vector<ResidualBlock> blocks_;
  std::vector<Conv2d> film_;
  std::vector<Upsample> up_;
};

class HdrSynthesis {
 public:
  HdrSynthesis() = default;
  HdrSynthesis(ParamStore& store, const NetworkConfig& cfg, Rng& rng);
  FeatureMaps operator()(const ag::Var& y) const;

  // Channel counts at 1/4, 1/2, 1/1.
  static std::vector<int> channel_counts(int base_channels);

 private:
  int stages_ = 0;
  Conv2d in_;
  std::vector<ResidualBlock> up_blocks_;
  std::vector<Upsample> up_;
  std::vector<Conv2d> down_;
  Upsample half_;
  Upsample full_;
};

class ReconstructionNet {
 public:
  ReconstructionNet() = default;
  ReconstructionNet(ParamStore& store, const NetworkConfig& cfg, Rng& rng);
  // ldr: [N, 3, H, W] with H, W no larger than the finest feature scale.
  // Returns non-negative radiance of the same extent.
  ag::Var operator()(const ag::Var& ldr, const FeatureMaps& features) const;

 private:
  Conv2d enc0_;
  Conv2d down1_;
  Conv2d fuse1_;
  Conv2d down2_;
  Conv2d fuse2_;
  ResidualBlock mid_;
  Upsample up1_;
  Conv2d dec1_;
  Upsample up0_;
  Conv2d dec0_;
  Conv2d out_;
};

// The learned transforms l_a, h_a, l_s, h_s, r and the luminance embedding.
struct Transforms {
  Transforms() = default;
  Transforms(ParamStore& store, const NetworkConfig& cfg, Rng& rng);

  NetworkConfig config;
  LuminanceEmbedder embedder;
  AnalysisTransform ldr_analysis;
  AnalysisTransform hdr_analysis;
  LdrSynthesis ldr_synthesis;
  HdrSynthesis hdr_synthesis;
  ReconstructionNet reconstruction;
};

// Image-level inference entry points (no gradient recording).
LuminanceEmbedding luminance_embedding(const Transforms& t, double l_max);
LatentTensor analysis_ldr(const Transforms& t, const HdrImage& s);
LatentTensor analysis_hdr(const Transforms& t, const HdrImage& s);
// Crops the output to out_height x out_width (the unpadded image size).
LdrImage synthesis_ldr(const Transforms& t, const LatentTensor& y, double l_max,
                       int out_height, int out_width);
FeatureMaps synthesis_hdr(const Transforms& t, const LatentTensor& y);
HdrImage reconstruct(const Transforms& t, const LdrImage& ldr,
                     const FeatureMaps& features);

}  // namespace hdrc

#endif  // HDRC_NETWORKS_H_
