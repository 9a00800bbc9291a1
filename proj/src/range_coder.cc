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

#include "hdrc/range_coder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hdrc/errors.h"

namespace hdrc {
namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kBot = 1u << 16;

void check_distribution(const CodingDistribution& dist) {
  if (dist.cdf.size() < 2 || dist.cdf.front() != 0 ||
      dist.cdf.back() != kTotalFrequency) {
    throw ParameterError("malformed coding distribution");
  }
}

}  // namespace

CodingDistribution quantize_distribution(int lo, std::span<const double> probs,
                                         double escape) {
  const std::size_t n = probs.size() + 1;
  if (n > kTotalFrequency) throw ParameterError("coding support too large");
  std::vector<std::int64_t> freq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = i + 1 < n ? probs[i] : escape;
    if (!(p >= 0) || !std::isfinite(p)) {
      throw ParameterError("probabilities must be finite and non-negative");
    }
    freq[i] = std::max<std::int64_t>(1, std::llround(p * kTotalFrequency));
  }
  std::int64_t diff =
      static_cast<std::int64_t>(kTotalFrequency) -
      std::accumulate(freq.begin(), freq.end(), std::int64_t{0});
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
      order.begin(), order.end(),
      [&](std::size_t a, std::size_t b) { return freq[a] > freq[b]; });
  if (diff > 0) {
    freq[order[0]] += diff;
  } else {
    // Take from the largest slots first, never below 1.
    for (std::size_t k = 0; diff < 0; k = (k + 1) % n) {
      const std::int64_t take = std::min(-diff, freq[order[k]] - 1);
      freq[order[k]] -= take;
      diff += take;
    }
  }
  CodingDistribution d;
  d.lo = lo;
  d.cdf.resize(n + 1);
  d.cdf[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d.cdf[i + 1] = d.cdf[i] + static_cast<std::uint32_t>(freq[i]);
  }
  return d;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
  range_ >>= kPrecisionBits;
  low_ += cum * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
    out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeEncoder::encode_symbol(int value, const CodingDistribution& dist) {
  check_distribution(dist);
  const int n = dist.support_size();
  const int slot = value - dist.lo;
  if (slot >= 0 && slot < n) {
    encode(dist.cdf[slot], dist.cdf[slot + 1] - dist.cdf[slot]);
    return;
  }
  if (value < kEscapeMin || value > kEscapeMax) {
    throw ParameterError("symbol " + std::to_string(value) +
                         " is outside the codable range");
  }
  encode(dist.cdf[n], dist.cdf[n + 1] - dist.cdf[n]);
  encode(static_cast<std::uint16_t>(static_cast<std::int16_t>(value)), 1);
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes)
    : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= bytes_.size())
    throw CorruptionError("range-coded stream truncated");
  return bytes_[pos_++];
}

std::uint32_t RangeDecoder::decode_frequency() {
  range_ >>= kPrecisionBits;
  const std::uint32_t f = (code_ - low_) / range_;
  if (f >= kTotalFrequency) throw CorruptionError("range-coded stream corrupt");
  return f;
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq) {
  low_ += cum * range_;
  range_ *= freq;
  while ((low_ ^ (low_ + range_)) < kTop ||
         (range_ < kBot && ((range_ = (0u - low_) & (kBot - 1)), true))) {
    code_ = (code_ << 8) | next_byte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

int RangeDecoder::decode_symbol(const CodingDistribution& dist) {
  check_distribution(dist);
  const std::uint32_t f = decode_frequency();
  const auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), f);
  const int slot = static_cast<int>(it - dist.cdf.begin()) - 1;
  consume(dist.cdf[slot], dist.cdf[slot + 1] - dist.cdf[slot]);
  if (slot < dist.support_size()) return dist.lo + slot;
  const std::uint32_t raw = decode_frequency();
  consume(raw, 1);
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(raw));
}

void RangeDecoder::finish() const {
  if (pos_ != bytes_.size()) {
    throw CorruptionError("range-coded stream has trailing bytes");
  }
}

std::vector<std::uint8_t> range_encode(std::span<const std::int32_t> symbols,
                                       const PmfProvider& provider) {
  if (symbols.empty()) return {};
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    enc.encode_symbol(symbols[i], provider(i, symbols.first(i)));
  }
  return enc.finish();
}

std::vector<std::int32_t> range_decode(std::span<const std::uint8_t> bytes,
                                       std::size_t count,
                                       const PmfProvider& provider) {
  if (count == 0) {
    if (!bytes.empty())
      throw CorruptionError("unexpected payload for empty stream");
    return {};
  }
  RangeDecoder dec(bytes);
  std::vector<std::int32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const CodingDistribution d =
        provider(i, std::span<const std::int32_t>(out));
    out.push_back(dec.decode_symbol(d));
  }
  dec.finish();
  return out;
}

}  // namespace hdrc
