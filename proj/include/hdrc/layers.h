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

#ifndef HDRC_LAYERS_H_
#define HDRC_LAYERS_H_

#include <string>
#include <string_view>
#include <vector>

#include "hdrc/autograd.h"
#include "hdrc/random.h"

namespace hdrc {

struct NamedParam {
  std::string name;
  ag::Var var;
};

// Owns every trainable array of a model, in registration order.
class ParamStore {
 public:
  // Uniform in [-bound, bound].
  ag::Var create_uniform(const std::string& name, Shape shape, double bound,
                         Rng& rng);
  ag::Var create_constant(const std::string& name, Shape shape, double value);

  const std::vector<NamedParam>& entries() const { return entries_; }
  // Throws ModelError if missing.
  ag::Var find(std::string_view name) const;
  void zero_grad();
  std::size_t scalar_count() const;

 private:
  ag::Var add(const std::string& name, Tensor value);
  std::vector<NamedParam> entries_;
};

class Conv2d {
 public:
  Conv2d() = default;
  // He-style uniform init scaled by `gain`.
  Conv2d(ParamStore& store, const std::string& name, int in_channels,
         int out_channels, int kernel, int stride, Rng& rng, double gain = 1.0);

  ag::Var operator()(const ag::Var& x) const;
  const ag::Var& weight() const { return weight_; }
  const ag::Var& bias() const { return bias_; }
  int stride() const { return stride_; }
  int padding() const { return pad_; }

 private:
  ag::Var weight_;
  ag::Var bias_;
  int stride_ = 1;
  int pad_ = 0;
};

// x + conv(gelu(conv(gelu(x)))).
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(ParamStore& store, const std::string& name, int channels,
                Rng& rng);
  ag::Var operator()(const ag::Var& x) const;

 private:
  Conv2d conv1_;
  Conv2d conv2_;
};

// Simplified attention: x + trunk(x) * sigmoid(mask(x)).
class AttentionBlock {
 public:
  AttentionBlock() = default;
  AttentionBlock(ParamStore& store, const std::string& name, int channels,
                 Rng& rng);
  ag::Var operator()(const ag::Var& x) const;

 private:
  ResidualBlock trunk_;
  Conv2d mask_in_;
  Conv2d mask_out_;
};

// Stride-2 sub-pixel upsampling: pixel_shuffle(conv3x3(x -> 4 * out)).
class Upsample {
 public:
  Upsample() = default;
  Upsample(ParamStore& store, const std::string& name, int in_channels,
           int out_channels, Rng& rng);
  ag::Var operator()(const ag::Var& x) const;

 private:
  Conv2d conv_;
};

}  // namespace hdrc

#endif  // HDRC_LAYERS_H_
