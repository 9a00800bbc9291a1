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

#ifndef HDRC_CHECKPOINT_H_
#define HDRC_CHECKPOINT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdrc/model.h"
#include "json.hpp"

namespace hdrc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// First and second Adam moments, one tensor per parameter in store order.
struct AdamState {
  std::int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  nlohmann::json metadata;
  std::optional<AdamState> adam;
};

// Binary archive: magic, version, JSON metadata (network config plus caller
// fields), named parameter arrays with optional Adam moments, and a trailing
// FNV-1a 64-bit checksum.
std::vector<std::uint8_t> serialize_checkpoint(const Model& model,
                                               const nlohmann::json& metadata,
                                               const AdamState* adam = nullptr);
// Throws ModelError for anything that is not a valid checkpoint of a
// supported version (bad magic, checksum, truncation, layout mismatch).
LoadedCheckpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::string& path, const Model& model,
                     const nlohmann::json& metadata = nlohmann::json::object(),
                     const AdamState* adam = nullptr);
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace hdrc

#endif  // HDRC_CHECKPOINT_H_
