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

#include "hdrc/random.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hdrc/errors.h"

namespace hdrc {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
  os.precision(17);
  os << std::hexfloat << spare_;
  return os.str();
}

void Rng::set_state(const std::string& state) {
  std::istringstream is(state);
  int spare_flag = 0;
  is >> engine_ >> spare_flag;
  std::string spare_text;
  is >> spare_text;
  if (is.fail() && !is.eof()) throw ParameterError("bad rng state");
  spare_ = spare_text.empty() ? 0.0 : std::strtod(spare_text.c_str(), nullptr);
  has_spare_ = spare_flag != 0;
}

}  // namespace hdrc
