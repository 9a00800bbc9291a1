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

#include "hdrc/checkpoint.h"

#include <bit>
#include <cstring>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"

namespace hdrc {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'H', 'D', 'R', 'C', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void string(const std::string& s) {
    put<std::uint64_t>(s.size());
    bytes(s.data(), s.size());
  }
  void tensor_data(const Tensor& t) {
    bytes(t.data(), t.size() * sizeof(double));
  }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const std::uint8_t* take(std::size_t n) {
    if (n > in_.size() - pos_) throw ModelError("checkpoint truncated");
    const std::uint8_t* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string string() {
    const std::uint64_t n = get<std::uint64_t>();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  void tensor_data(Tensor& t) {
    std::memcpy(t.data(), take(t.size() * sizeof(double)),
                t.size() * sizeof(double));
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Model& model,
                                               const nlohmann::json& metadata,
                                               const AdamState* adam) {
  const auto& entries = model.params().entries();
  if (adam != nullptr &&
      (adam->m.size() != entries.size() || adam->v.size() != entries.size())) {
    throw ParameterError("optimizer state does not match the parameters");
  }
  nlohmann::json meta = metadata;
  meta["network"] = to_json(model.config());
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.string(meta.dump());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(entries.size()));
  w.put<std::uint8_t>(adam != nullptr ? 1 : 0);
  w.put<std::int64_t>(adam != nullptr ? adam->step : 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Tensor& t = entries[i].var.value();
    w.string(entries[i].name);
    w.put<std::int32_t>(t.shape().n);
    w.put<std::int32_t>(t.shape().c);
    w.put<std::int32_t>(t.shape().h);
    w.put<std::int32_t>(t.shape().w);
    w.tensor_data(t);
    if (adam != nullptr) {
      w.tensor_data(adam->m[i]);
      w.tensor_data(adam->v[i]);
    }
  }
  const std::uint64_t sum = fnv1a64(w.out());
  w.put<std::uint64_t>(sum);
  return std::move(w.out());
}

LoadedCheckpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ModelError("not a checkpoint file");
  }
  if (bytes.size() < sizeof(kMagic) + 4 + 8)
    throw ModelError("checkpoint truncated");
  Reader r(bytes.first(bytes.size() - 8));
  r.take(sizeof(kMagic));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ModelError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (stored != fnv1a64(bytes.first(bytes.size() - 8))) {
    throw ModelError("checkpoint checksum mismatch");
  }
  LoadedCheckpoint out;
  try {
    out.metadata = nlohmann::json::parse(r.string());
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("checkpoint metadata: ") + e.what());
  }
  NetworkConfig cfg;
  try {
    cfg = network_config_from_json(out.metadata.at("network"));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("checkpoint network config: ") + e.what());
  } catch (const Error& e) {
    throw ModelError(std::string("checkpoint network config: ") + e.what());
  }
  out.model = std::make_unique<Model>(cfg, 0);
  const auto& entries = out.model->params().entries();
  const auto count = r.get<std::uint32_t>();
  const bool has_adam = r.get<std::uint8_t>() != 0;
  const auto step = r.get<std::int64_t>();
  if (count != entries.size()) {
    throw ModelError("checkpoint has " + std::to_string(count) +
                     " parameters, model expects " +
                     std::to_string(entries.size()));
  }
  AdamState adam;
  adam.step = step;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string name = r.string();
    Shape s;
    s.n = r.get<std::int32_t>();
    s.c = r.get<std::int32_t>();
    s.h = r.get<std::int32_t>();
    s.w = r.get<std::int32_t>();
    if (name != entries[i].name || !(s == entries[i].var.shape())) {
      throw ModelError("checkpoint parameter " + name + " " + s.str() +
                       " does not match " + entries[i].name);
    }
    r.tensor_data(entries[i].var.mutable_value());
    if (has_adam) {
      adam.m.emplace_back(s);
      adam.v.emplace_back(s);
      r.tensor_data(adam.m.back());
      r.tensor_data(adam.v.back());
    }
  }
  if (r.remaining() != 0) throw ModelError("trailing bytes in checkpoint");
  if (has_adam) out.adam = std::move(adam);
  return out;
}

void save_checkpoint(const std::string& path, const Model& model,
                     const nlohmann::json& metadata, const AdamState* adam) {
  write_file_bytes(path, serialize_checkpoint(model, metadata, adam));
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const FormatError& e) {
    throw ModelError(e.what());
  }
  return parse_checkpoint(bytes);
}

}  // namespace hdrc
