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

#include "hdrc/model.h"

#include <cstring>
#include <string>

namespace hdrc {

Model::Model(const NetworkConfig& cfg, std::uint64_t seed) : config_(cfg) {
  cfg.validate();
  Rng rng(seed);
  transforms_ = Transforms(params_, cfg, rng);
  ldr_entropy_ = LdrEntropyModel(params_, cfg, rng);
  hdr_entropy_ = HdrEntropyModel(params_, cfg, rng);
}

std::uint32_t fnv1a32(std::span<const std::uint8_t> bytes, std::uint32_t seed) {
  std::uint32_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 16777619u;
  }
  return h;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint32_t Model::model_id() const {
  auto as_bytes = [](const void* p, std::size_t n) {
    return std::span<const std::uint8_t>(static_cast<const std::uint8_t*>(p),
                                         n);
  };
  const std::string cfg = to_json(config_).dump();
  std::uint32_t h = fnv1a32(as_bytes(cfg.data(), cfg.size()));
  for (const NamedParam& p : params_.entries()) {
    h = fnv1a32(as_bytes(p.name.data(), p.name.size()), h);
    const Tensor& t = p.var.value();
    h = fnv1a32(as_bytes(t.data(), t.size() * sizeof(double)), h);
  }
  return h;
}

}  // namespace hdrc
