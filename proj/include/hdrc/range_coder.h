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

#ifndef HDRC_RANGE_CODER_H_
#define HDRC_RANGE_CODER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hdrc {

inline constexpr int kPrecisionBits = 16;
inline constexpr std::uint32_t kTotalFrequency = 1u << kPrecisionBits;
// Values representable without escape.
inline constexpr int kSymbolMin = -1024;
inline constexpr int kSymbolMax = 1023;
// Values reachable through the escape code (raw 16-bit two's complement).
inline constexpr int kEscapeMin = -32768;
inline constexpr int kEscapeMax = 32767;

// Quantized distribution over the integers lo, lo+1, ..., lo+n-1 plus a
// trailing escape slot. cdf has n + 2 entries, cdf[0] = 0 and
// cdf.back() = kTotalFrequency, every slot with frequency >= 1.
struct CodingDistribution {
  int lo = 0;
  std::vector<std::uint32_t> cdf;

  int support_size() const { return static_cast<int>(cdf.size()) - 2; }
};

// Frequencies max(1, round(p * 2^16)) with the rounding surplus or deficit
// settled on the most probable slots. probs covers the support; escape is the
// probability of the escape slot. Inputs need not be normalized.
CodingDistribution quantize_distribution(int lo, std::span<const double> probs,
                                         double escape);

// Distribution for the symbol at `index`, given all symbols before it.
using PmfProvider = std::function<CodingDistribution(
    std::size_t index, std::span<const std::int32_t> history)>;

// Carry-less byte-oriented range coder with 32-bit state.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq);
  // Value outside the distribution's support: escape, then 16 raw bits.
  void encode_symbol(int value, const CodingDistribution& dist);
  std::vector<std::uint8_t> finish();

 private:
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);
  int decode_symbol(const CodingDistribution& dist);
  // Throws CorruptionError unless every byte was consumed.
  void finish() const;

 private:
  std::uint32_t decode_frequency();
  void consume(std::uint32_t cum, std::uint32_t freq);
  std::uint8_t next_byte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// An empty symbol array encodes to an empty payload.
std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const PmfProvider& provider);
std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> bytes,
                                       std::size_t count,
                                       const PmfProvider& provider);

}  // namespace hdrc

#endif  // HDRC_RANGE_CODER_H_
