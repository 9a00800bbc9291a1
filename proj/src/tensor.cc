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

#include "hdrc/tensor.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "hdrc/errors.h"

namespace hdrc {

std::string Shape::str() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(shape), data_(shape.size(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                     " does not match shape " + shape_.str());
  }
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add_inplace(const Tensor& other) {
  if (!(other.shape_ == shape_)) {
    throw ShapeError("add_inplace: " + shape_.str() + " vs " +
                     other.shape_.str());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

double Tensor::sum() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace hdrc
