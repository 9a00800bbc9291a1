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

#ifndef HDRC_GOLDEN_H_
#define HDRC_GOLDEN_H_

#include <cstdint>
#include <span>

#include "hdrc/image.h"
#include "hdrc/model.h"
#include "hdrc/networks.h"

namespace hdrc {

// Settings of the committed golden container fixture.
inline constexpr std::uint64_t kGoldenSeed = 7;
inline constexpr int kGoldenSize = 32;
inline constexpr double kGoldenLmax = 1e5;
inline constexpr const char* kGoldenCheckpoint = "golden.ckpt";
inline constexpr const char* kGoldenImage = "golden.hdr";
inline constexpr const char* kGoldenBitstream = "golden.epic";
inline constexpr const char* kGoldenDigest = "golden_decode.json";

inline NetworkConfig golden_network_config() {
  NetworkConfig c;
  c.base_channels = 4;
  c.ldr_latent_channels = 4;
  c.hdr_latent_channels = 2;
  c.num_down_stages = 2;
  c.embed_dim = 4;
  return c;
}

// FNV-1a-64 of the raw little-endian doubles of an image.
inline std::uint64_t pixel_digest(const Image& im) {
  const auto& d = im.data();
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(d.data()),
                           d.size() * sizeof(double)));
}

}  // namespace hdrc

#endif  // HDRC_GOLDEN_H_
