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

#include "hdrc/fusion.h"

#include <algorithm>
#include <cmath>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/metrics.h"
#include "hdrc/ops.h"

namespace hdrc {
namespace {

constexpr double kBinomial[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                 1.0 / 16};
constexpr double kBinomialUp[5] = {2.0 / 16, 8.0 / 16, 12.0 / 16, 8.0 / 16,
                                   2.0 / 16};
constexpr double kLaplacian3[9] = {0, 1, 0, 1, -4, 1, 0, 1, 0};

void check_frames(std::span<const LdrImage> frames) {
  if (frames.empty()) throw ParameterError("fusion needs at least one frame");
  const int h = frames[0].pixels.height();
  const int w = frames[0].pixels.width();
  if (h < 1 || w < 1) throw ShapeError("fusion frames are empty");
  for (const LdrImage& f : frames) {
    if (f.pixels.height() != h || f.pixels.width() != w) {
      throw ShapeError("fusion frames differ in size");
    }
  }
}

ag::Var reduce(const ag::Var& x) {
  return ag::downsample2(ag::filter_separable(x, kBinomial));
}

ag::Var expand(const ag::Var& x, int h, int w) {
  return ag::filter_separable(ag::upsample2(x, h, w), kBinomialUp);
}

}  // namespace

FusionWeights fusion_weights(std::span<const LdrImage> frames) {
  check_frames(frames);
  const int h = frames[0].pixels.height();
  const int w = frames[0].pixels.width();
  FusionWeights out;
  for (const LdrImage& f : frames) {
    const Plane lum = luminance(f.pixels);
    Plane contrast(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int ky = -1; ky <= 1; ++ky) {
          for (int kx = -1; kx <= 1; ++kx) {
            acc += kLaplacian3[(ky + 1) * 3 + kx + 1] *
                   lum.at(ag::mirror_index(y + ky, h),
                          ag::mirror_index(x + kx, w));
          }
        }
        contrast.at(y, x) = std::fabs(acc);
      }
    }
    Plane weight(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double mean = 0.0;
        for (int c = 0; c < 3; ++c) mean += f.pixels.at(y, x, c);
        mean /= 3.0;
        double var = 0.0;
        double exposed = 1.0;
        for (int c = 0; c < 3; ++c) {
          const double v = f.pixels.at(y, x, c);
          var += (v - mean) * (v - mean);
          const double d = v - kWellExposedMean;
          exposed *=
              std::exp(-d * d / (2.0 * kWellExposedSigma * kWellExposedSigma));
        }
        const double saturation = std::sqrt(var / 3.0);
        weight.at(y, x) =
            contrast.at(y, x) * saturation * exposed + kFusionWeightFloor;
      }
    }
    out.weights.push_back(std::move(weight));
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) {
    double total = 0.0;
    for (const Plane& p : out.weights) total += p.data[i];
    for (Plane& p : out.weights) p.data[i] /= total;
  }
  return out;
}

LdrImage exposure_fusion(std::span<const LdrImage> frames) {
  check_frames(frames);
  if (frames.size() == 1) return frames[0];
  const int h = frames[0].pixels.height();
  const int w = frames[0].pixels.width();
  const FusionWeights fw = fusion_weights(frames);
  const int levels = NlpdConfig{}.effective_levels(h, w);
  ag::NoGradGuard guard;
  std::vector<ag::Var> blended(levels);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    ag::Var g = ag::constant(Tensor(Shape{1, 1, h, w}, fw.weights[k].data));
    ag::Var img = ag::constant(frames[k].pixels.to_tensor());
    for (int l = 0; l < levels; ++l) {
      ag::Var band = img;
      ag::Var next_img;
      ag::Var next_g;
      if (l + 1 < levels) {
        next_img = reduce(img);
        band = ag::sub(img, expand(next_img, img.shape().h, img.shape().w));
        next_g = reduce(g);
      }
      const ag::Var term = ag::mul(band, g);
      blended[l] = blended[l].defined() ? ag::add(blended[l], term) : term;
      img = next_img;
      g = next_g;
    }
  }
  ag::Var r = blended[levels - 1];
  for (int l = levels - 2; l >= 0; --l) {
    r = ag::add(blended[l],
                expand(r, blended[l].shape().h, blended[l].shape().w));
  }
  LdrImage out;
  out.pixels = Image::from_tensor(ag::clamp(r, 0.0, 1.0).value());
  return out;
}

std::vector<LdrImage> pseudo_exposure_stack(const Model& model,
                                            const LatentTensor& y_bar_l,
                                            int height, int width) {
  std::vector<LdrImage> stack;
  for (double l : kConditioningLuminances) {
    stack.push_back(
        synthesis_ldr(model.transforms(), y_bar_l, l, height, width));
  }
  return stack;
}

}  // namespace hdrc
