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

#ifndef HDRC_DATASET_H_
#define HDRC_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hdrc/image.h"

namespace hdrc {

// Procedural HDR scene: a sky gradient, textured patches and a few small
// light sources several orders of magnitude brighter than the background.
HdrImage synthetic_scene(std::uint64_t seed, int height, int width);

struct CropSettings {
  double fov = 1.5707963267948966;  // radians
  int size = 64;
};

// One perspective crop per manifest entry, read from its panorama.
std::vector<HdrImage> crops_from_manifest(const std::filesystem::path& manifest,
                                          const CropSettings& settings);

// Reads every .hdr file of a directory, sorted by name.
std::vector<HdrImage> read_hdr_directory(const std::filesystem::path& dir);

// Writes images as <dir>/<index padded to 4 digits>.hdr.
void write_hdr_directory(const std::filesystem::path& dir,
                         const std::vector<HdrImage>& images);

}  // namespace hdrc

#endif  // HDRC_DATASET_H_
