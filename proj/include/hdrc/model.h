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

#ifndef HDRC_MODEL_H_
#define HDRC_MODEL_H_

#include <cstdint>

#include "hdrc/entropy_models.h"
#include "hdrc/layers.h"
#include "hdrc/networks.h"

namespace hdrc {

// All learned components of the codec, sharing one parameter store.
class Model {
 public:
  Model(const NetworkConfig& cfg, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const NetworkConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const Transforms& transforms() const { return transforms_; }
  const LdrEntropyModel& ldr_entropy() const { return ldr_entropy_; }
  const HdrEntropyModel& hdr_entropy() const { return hdr_entropy_; }

  // 32-bit FNV-1a over the configuration and every parameter value.
  std::uint32_t model_id() const;

 private:
  NetworkConfig config_;
  ParamStore params_;
  Transforms transforms_;
  LdrEntropyModel ldr_entropy_;
  HdrEntropyModel hdr_entropy_;
};

std::uint32_t fnv1a32(std::span<const std::uint8_t> bytes,
                      std::uint32_t seed = 2166136261u);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 14695981039346656037ull);

}  // namespace hdrc

#endif  // HDRC_MODEL_H_
