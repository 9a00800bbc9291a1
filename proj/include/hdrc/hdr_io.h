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

#ifndef HDRC_HDR_IO_H_
#define HDRC_HDR_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hdrc/image.h"

namespace hdrc {

// Rec. 709 luminance weights.
inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

Plane luminance(const Image& image);
inline Plane luminance(const HdrImage& image) {
  return luminance(image.pixels);
}
inline Plane luminance(const LdrImage& image) {
  return luminance(image.pixels);
}

// Radiance RGBE (.hdr). Pixel (r, g, b, e) decodes to c * 2^(e - 136) for
// e > 0 and to zero otherwise. Both new-style RLE and flat scanlines are read;
// writing uses RLE when the width allows it.
HdrImage read_radiance_hdr(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_radiance_hdr(const HdrImage& image);

HdrImage read_radiance_hdr_file(const std::filesystem::path& path);
void write_radiance_hdr_file(const std::filesystem::path& path,
                             const HdrImage& image);

// Shared-exponent conversions for one pixel.
void float_to_rgbe(double r, double g, double b, std::uint8_t out[4]);
void rgbe_to_float(const std::uint8_t in[4], double* r, double* g, double* b);

// Gnomonic view of an equirectangular panorama (width == 2 * height) looking
// along (yaw, pitch) with a square field of view `fov` radians. Bilinear
// sampling wraps in longitude and clamps in latitude.
HdrImage equirect_to_perspective(const HdrImage& panorama, double yaw,
                                 double pitch, double fov, int out_size);

// Divides by the maximum luminance; the brightest pixel gets luminance 1.
// Records the factor in scale_applied and clears the calibration.
HdrImage preprocess(const HdrImage& image);

// One line of a dataset manifest: "<path> <yaw> <pitch>".
struct ManifestEntry {
  std::string path;
  double yaw = 0.0;
  double pitch = 0.0;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

// Writes an 8-bit binary PPM of a [0, 1] image (for viewing decoded LDR
// output).
void write_ppm_file(const std::filesystem::path& path, const LdrImage& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace hdrc

#endif  // HDRC_HDR_IO_H_
