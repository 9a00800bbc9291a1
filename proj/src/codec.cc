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

#include "hdrc/codec.h"

#include <cmath>

#include "hdrc/entropy_models.h"
#include "hdrc/errors.h"
#include "hdrc/fusion.h"
#include "hdrc/hdr_io.h"

namespace hdrc {
namespace {

// Upper bound on decoded image area, guarding allocations on hostile headers.
constexpr std::uint64_t kMaxPixels = 1ull << 28;

void check_l_max(double l_max) {
  if (!(l_max >= kMinSceneLuminance && l_max <= kMaxSceneLuminance)) {
    throw ParameterError("maximum scene luminance must be in [1, 1e9] cd/m^2");
  }
}

HdrImage reconstruct_calibrated(const Model& model, const LdrImage& ldr,
                                const Tensor& y_h, double l_max) {
  LatentTensor yh{y_h, true};
  HdrImage hdr = reconstruct(model.transforms(), ldr,
                             synthesis_hdr(model.transforms(), yh));
  hdr.calib_max_luminance = l_max;
  return hdr;
}

}  // namespace

Shape latent_shape(const NetworkConfig& cfg, int channels, int height,
                   int width) {
  const PaddedSize p = padded_size(height, width, cfg.alignment());
  return Shape{1, channels, p.height >> cfg.num_down_stages,
               p.width >> cfg.num_down_stages};
}

CompressResult compress_detailed(const HdrImage& s, const Model& model,
                                 double l_max) {
  check_l_max(l_max);
  if (s.pixels.empty()) throw ShapeError("cannot compress an empty image");
  if (s.pixels.height() > 65535 || s.pixels.width() > 65535) {
    throw ShapeError("image too large");
  }
  const HdrImage pre = preprocess(s);
  const Transforms& t = model.transforms();
  CompressResult r;
  r.latents.y_l = quantize(analysis_ldr(t, pre).values);
  r.latents.y_h = quantize(analysis_hdr(t, pre).values);
  {
    ag::NoGradGuard guard;
    r.latents.z_l = quantize(model.ldr_entropy()
                                 .hyper_analysis(ag::constant(r.latents.y_l))
                                 .value());
  }
  r.estimated_bits_ldr = model.ldr_entropy().rate(r.latents.y_l, r.latents.z_l);
  r.estimated_bits_hdr = model.hdr_entropy().rate(r.latents.y_h);

  const PaddedSize p = padded_size(s.pixels.height(), s.pixels.width(),
                                   model.config().alignment());
  BitstreamHeader& h = r.bitstream.header;
  h.width = static_cast<std::uint32_t>(s.pixels.width());
  h.height = static_cast<std::uint32_t>(s.pixels.height());
  h.pad_h = static_cast<std::uint16_t>(p.pad_h);
  h.pad_w = static_cast<std::uint16_t>(p.pad_w);
  h.l_max = static_cast<float>(l_max);
  h.model_id = model.model_id();
  r.bitstream.ldr_stream =
      model.ldr_entropy().encode(r.latents.y_l, r.latents.z_l);
  r.bitstream.hdr_stream = model.hdr_entropy().encode(r.latents.y_h);
  return r;
}

Bitstream compress(const HdrImage& s, const Model& model, double l_max) {
  return compress_detailed(s, model, l_max).bitstream;
}

QuantizedLatents decode_latents(const Bitstream& b, const Model& model) {
  const BitstreamHeader& h = b.header;
  if (h.model_id != model.model_id()) {
    throw ModelError("bitstream was produced by a different model");
  }
  if (h.width == 0 || h.height == 0 || h.width > 65535 || h.height > 65535 ||
      static_cast<std::uint64_t>(h.width) * h.height > kMaxPixels) {
    throw CorruptionError("bitstream has invalid image dimensions");
  }
  const NetworkConfig& cfg = model.config();
  const PaddedSize p = padded_size(static_cast<int>(h.height),
                                   static_cast<int>(h.width), cfg.alignment());
  if (p.pad_h != h.pad_h || p.pad_w != h.pad_w) {
    throw CorruptionError("bitstream padding does not match its dimensions");
  }
  if (!std::isfinite(h.l_max) || !(h.l_max > 0)) {
    throw CorruptionError("bitstream luminance is invalid");
  }
  QuantizedLatents q;
  const Shape yl =
      latent_shape(cfg, cfg.ldr_latent_channels, h.height, h.width);
  const Shape yh =
      latent_shape(cfg, cfg.hdr_latent_channels, h.height, h.width);
  LdrEntropyModel::Decoded d = model.ldr_entropy().decode(b.ldr_stream, yl);
  q.y_l = std::move(d.y_bar);
  q.z_l = std::move(d.z_bar);
  q.y_h = model.hdr_entropy().decode(b.hdr_stream, yh);
  return q;
}

DecodedImage decompress(const Bitstream& b, const Model& model,
                        std::optional<double> l_max) {
  const double lm = l_max ? *l_max : static_cast<double>(b.header.l_max);
  if (l_max) check_l_max(lm);
  const QuantizedLatents q = decode_latents(b, model);
  DecodedImage out;
  out.ldr = synthesis_ldr(model.transforms(), LatentTensor{q.y_l, true}, lm,
                          static_cast<int>(b.header.height),
                          static_cast<int>(b.header.width));
  out.hdr = reconstruct_calibrated(model, out.ldr, q.y_h, lm);
  return out;
}

AutoDecoded automated_decode(const Bitstream& b, const Model& model) {
  const QuantizedLatents q = decode_latents(b, model);
  AutoDecoded out;
  out.stack = pseudo_exposure_stack(model, LatentTensor{q.y_l, true},
                                    static_cast<int>(b.header.height),
                                    static_cast<int>(b.header.width));
  out.fused = exposure_fusion(out.stack);
  out.hdr = reconstruct_calibrated(model, out.fused, q.y_h,
                                   static_cast<double>(b.header.l_max));
  return out;
}

double bits_per_pixel(const Bitstream& b) {
  const double pixels = static_cast<double>(b.header.width) * b.header.height;
  return 8.0 * static_cast<double>(b.ldr_stream.size() + b.hdr_stream.size()) /
         pixels;
}

double side_bits_per_pixel(const Bitstream& b) {
  const double pixels = static_cast<double>(b.header.width) * b.header.height;
  return 8.0 * static_cast<double>(b.hdr_stream.size()) / pixels;
}

}  // namespace hdrc
