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

#ifndef HDRC_TENSOR_H_
#define HDRC_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hdrc {

// NCHW extent. Unused leading dimensions are 1.
struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t size() const { return static_cast<std::size_t>(n) * c * h * w; }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense row-major NCHW array of doubles with value semantics.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::size_t index(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) *
               shape_.w +
           w;
  }
  double& at(int n, int c, int h, int w) { return data_[index(n, c, h, w)]; }
  double at(int n, int c, int h, int w) const {
    return data_[index(n, c, h, w)];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Pointer to the contiguous h*w plane of (n, c).
  double* plane(int n, int c) { return data_.data() + index(n, c, 0, 0); }
  const double* plane(int n, int c) const {
    return data_.data() + index(n, c, 0, 0);
  }

  void fill(double v);
  void add_inplace(const Tensor& other);
  double sum() const;
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace hdrc

#endif  // HDRC_TENSOR_H_
