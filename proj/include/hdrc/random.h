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

#ifndef HDRC_RANDOM_H_
#define HDRC_RANDOM_H_

#include <cstdint>
#include <random>
#include <string>

namespace hdrc {

// Seeded generator whose output is identical on every platform: the engine is
// fully specified by the standard and the distributions are implemented here
// instead of relying on the implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller.
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  // Textual engine state, for checkpoint resume.
  std::string state() const;
  void set_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hdrc

#endif  // HDRC_RANDOM_H_
