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

#include "hdrc/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/random.h"

namespace hdrc {

HdrImage synthetic_scene(std::uint64_t seed, int height, int width) {
  if (height < 1 || width < 1) throw ShapeError("scene size must be positive");
  Rng rng(seed);
  Image im(height, width);
  double top[3];
  double bottom[3];
  for (int c = 0; c < 3; ++c) {
    top[c] = rng.uniform(0.2, 1.0);
    bottom[c] = rng.uniform(0.01, 0.3);
  }
  const double fx = rng.uniform(0.05, 0.6);
  const double fy = rng.uniform(0.05, 0.6);
  const double phase = rng.uniform(0.0, 6.283185307179586);
  for (int y = 0; y < height; ++y) {
    const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    for (int x = 0; x < width; ++x) {
      const double tex =
          1.0 + 0.3 * std::sin(fx * x + phase) * std::cos(fy * y);
      for (int c = 0; c < 3; ++c) {
        im.at(y, x, c) = ((1.0 - t) * top[c] + t * bottom[c]) * tex;
      }
    }
  }
  const int patches = 2 + static_cast<int>(rng.uniform_index(4));
  for (int p = 0; p < patches; ++p) {
    const int y0 = static_cast<int>(rng.uniform_index(height));
    const int x0 = static_cast<int>(rng.uniform_index(width));
    const int ph =
        1 + static_cast<int>(rng.uniform_index(std::max(1, height / 2)));
    const int pw =
        1 + static_cast<int>(rng.uniform_index(std::max(1, width / 2)));
    double color[3];
    for (double& v : color) v = rng.uniform(0.005, 2.0);
    const double noise = rng.uniform(0.0, 0.2);
    for (int y = y0; y < std::min(height, y0 + ph); ++y) {
      for (int x = x0; x < std::min(width, x0 + pw); ++x) {
        const double n = 1.0 + noise * rng.normal();
        for (int c = 0; c < 3; ++c)
          im.at(y, x, c) = color[c] * std::max(0.1, n);
      }
    }
  }
  const int lights = 1 + static_cast<int>(rng.uniform_index(3));
  for (int l = 0; l < lights; ++l) {
    const double cy = rng.uniform(0.0, height);
    const double cx = rng.uniform(0.0, width);
    const double radius =
        rng.uniform(0.5, 0.5 + std::min(height, width) / 10.0);
    const double power = std::pow(10.0, rng.uniform(2.0, 4.0));
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        const double g = power * std::exp(-d2 / (2.0 * radius * radius));
        for (int c = 0; c < 3; ++c) im.at(y, x, c) += g;
      }
    }
  }
  return HdrImage{std::move(im), std::nullopt, std::nullopt};
}

std::vector<HdrImage> crops_from_manifest(const std::filesystem::path& manifest,
                                          const CropSettings& settings) {
  const std::vector<ManifestEntry> entries = read_manifest(manifest);
  std::map<std::string, HdrImage> panoramas;
  std::vector<HdrImage> out;
  for (const ManifestEntry& e : entries) {
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = manifest.parent_path() / p;
    auto it = panoramas.find(p.string());
    if (it == panoramas.end()) {
      it = panoramas.emplace(p.string(), read_radiance_hdr_file(p)).first;
    }
    out.push_back(equirect_to_perspective(it->second, e.yaw, e.pitch,
                                          settings.fov, settings.size));
  }
  return out;
}

std::vector<HdrImage> read_hdr_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".hdr") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<HdrImage> out;
  for (const auto& f : files) out.push_back(read_radiance_hdr_file(f));
  return out;
}

void write_hdr_directory(const std::filesystem::path& dir,
                         const std::vector<HdrImage>& images) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%04zu.hdr", i);
    write_radiance_hdr_file(dir / name, images[i]);
  }
}

}  // namespace hdrc
