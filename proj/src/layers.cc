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

#include "hdrc/layers.h"

#include <cmath>

#include "hdrc/errors.h"
#include "hdrc/ops.h"

namespace hdrc {

ag::Var ParamStore::add(const std::string& name, Tensor value) {
  for (const auto& e : entries_) {
    if (e.name == name) throw ModelError("duplicate parameter " + name);
  }
  ag::Var v(std::move(value), true);
  entries_.push_back({name, v});
  return v;
}

ag::Var ParamStore::create_uniform(const std::string& name, Shape shape,
                                   double bound, Rng& rng) {
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return add(name, std::move(t));
}

ag::Var ParamStore::create_constant(const std::string& name, Shape shape,
                                    double value) {
  return add(name, Tensor(shape, value));
}

ag::Var ParamStore::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.var;
  }
  throw ModelError("unknown parameter " + std::string(name));
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) {
    if (e.var.has_grad()) e.var.grad().fill(0.0);
  }
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.var.value().size();
  return n;
}

Conv2d::Conv2d(ParamStore& store, const std::string& name, int in_channels,
               int out_channels, int kernel, int stride, Rng& rng, double gain)
    : stride_(stride), pad_(kernel / 2) {
  const double fan_in = static_cast<double>(in_channels) * kernel * kernel;
  const double bound = gain * std::sqrt(3.0 / fan_in);
  weight_ = store.create_uniform(
      name + ".weight", Shape{out_channels, in_channels, kernel, kernel}, bound,
      rng);
  bias_ =
      store.create_constant(name + ".bias", Shape{1, out_channels, 1, 1}, 0.0);
}

ag::Var Conv2d::operator()(const ag::Var& x) const {
  return ag::conv2d(x, weight_, bias_, stride_, pad_);
}

ResidualBlock::ResidualBlock(ParamStore& store, const std::string& name,
                             int channels, Rng& rng)
    : conv1_(store, name + ".conv1", channels, channels, 3, 1, rng, 1.4),
      conv2_(store, name + ".conv2", channels, channels, 3, 1, rng, 0.5) {}

ag::Var ResidualBlock::operator()(const ag::Var& x) const {
  return ag::add(x, conv2_(ag::gelu(conv1_(ag::gelu(x)))));
}

AttentionBlock::AttentionBlock(ParamStore& store, const std::string& name,
                               int channels, Rng& rng)
    : trunk_(store, name + ".trunk", channels, rng),
      mask_in_(store, name + ".mask_in", channels, channels, 3, 1, rng, 1.4),
      mask_out_(store, name + ".mask_out", channels, channels, 1, 1, rng) {}

ag::Var AttentionBlock::operator()(const ag::Var& x) const {
  const ag::Var trunk = ag::sub(trunk_(x), x);
  const ag::Var mask = ag::sigmoid(mask_out_(ag::gelu(mask_in_(x))));
  return ag::add(x, ag::mul(trunk, mask));
}

Upsample::Upsample(ParamStore& store, const std::string& name, int in_channels,
                   int out_channels, Rng& rng)
    : conv_(store, name, in_channels, 4 * out_channels, 3, 1, rng) {}

ag::Var Upsample::operator()(const ag::Var& x) const {
  return ag::pixel_shuffle(conv_(x), 2);
}

}  // namespace hdrc
