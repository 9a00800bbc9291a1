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

#include "hdrc/bitstream.h"

#include <bit>
#include <cstring>
#include <string>

#include "hdrc/errors.h"

namespace hdrc {
namespace {

constexpr char kMagic[4] = {'E', 'P', 'I', 'C'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(
        static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  }
  pos += sizeof(T);
  return static_cast<T>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_bitstream(const Bitstream& b) {
  std::vector<std::uint8_t> out;
  out.reserve(b.total_bytes());
  out.insert(out.end(), kMagic, kMagic + 4);
  put<std::uint8_t>(out, b.header.version);
  put<std::uint32_t>(out, b.header.width);
  put<std::uint32_t>(out, b.header.height);
  put<std::uint16_t>(out, b.header.pad_h);
  put<std::uint16_t>(out, b.header.pad_w);
  put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(b.header.l_max));
  put<std::uint32_t>(out, b.header.model_id);
  put<std::uint64_t>(out, b.ldr_stream.size());
  put<std::uint64_t>(out, b.hdr_stream.size());
  out.resize(kHeaderSize, 0);
  out.insert(out.end(), b.ldr_stream.begin(), b.ldr_stream.end());
  out.insert(out.end(), b.hdr_stream.begin(), b.hdr_stream.end());
  return out;
}

Bitstream parse_bitstream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not an EPIC bitstream");
  }
  if (bytes.size() < kHeaderSize)
    throw CorruptionError("bitstream header truncated");
  std::size_t pos = 4;
  Bitstream b;
  b.header.version = get<std::uint8_t>(bytes, pos);
  if (b.header.version != kBitstreamVersion) {
    throw FormatError("unsupported bitstream version " +
                      std::to_string(b.header.version));
  }
  b.header.width = get<std::uint32_t>(bytes, pos);
  b.header.height = get<std::uint32_t>(bytes, pos);
  b.header.pad_h = get<std::uint16_t>(bytes, pos);
  b.header.pad_w = get<std::uint16_t>(bytes, pos);
  b.header.l_max = std::bit_cast<float>(get<std::uint32_t>(bytes, pos));
  b.header.model_id = get<std::uint32_t>(bytes, pos);
  const std::uint64_t len_ldr = get<std::uint64_t>(bytes, pos);
  const std::uint64_t len_hdr = get<std::uint64_t>(bytes, pos);
  for (; pos < kHeaderSize; ++pos) {
    if (bytes[pos] != 0)
      throw FormatError("reserved header bytes are not zero");
  }
  const std::uint64_t payload = bytes.size() - kHeaderSize;
  if (len_ldr > payload || len_hdr != payload - len_ldr) {
    throw CorruptionError("bitstream lengths do not match the payload size");
  }
  const auto* p = bytes.data() + kHeaderSize;
  b.ldr_stream.assign(p, p + len_ldr);
  b.hdr_stream.assign(p + len_ldr, p + len_ldr + len_hdr);
  return b;
}

}  // namespace hdrc
