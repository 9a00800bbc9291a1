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

#ifndef HDRC_BITSTREAM_H_
#define HDRC_BITSTREAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hdrc {

inline constexpr std::uint8_t kBitstreamVersion = 1;
// Packed little-endian header fields, then zero padding up to kHeaderSize.
inline constexpr std::size_t kHeaderFieldBytes = 41;
inline constexpr std::size_t kHeaderSize = 48;

struct BitstreamHeader {
  std::uint8_t version = kBitstreamVersion;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t pad_h = 0;
  std::uint16_t pad_w = 0;
  float l_max = 0.0f;  // cd/m^2
  std::uint32_t model_id = 0;

  bool operator==(const BitstreamHeader&) const = default;
};

// Layout: "EPIC", version u8, width u32, height u32, pad_h u16, pad_w u16,
// l_max f32, model_id u32, len_ldr u64, len_hdr u64, reserved, ldr stream,
// hdr stream.
struct Bitstream {
  BitstreamHeader header;
  std::vector<std::uint8_t> ldr_stream;  // z then y of the LDR branch
  std::vector<std::uint8_t> hdr_stream;

  std::size_t total_bytes() const {
    return kHeaderSize + ldr_stream.size() + hdr_stream.size();
  }
  bool operator==(const Bitstream&) const = default;
};

std::vector<std::uint8_t> serialize_bitstream(const Bitstream& b);
// Throws FormatError on bad magic/version/reserved bytes and CorruptionError
// when the lengths disagree with the input size.
Bitstream parse_bitstream(std::span<const std::uint8_t> bytes);

}  // namespace hdrc

#endif  // HDRC_BITSTREAM_H_
