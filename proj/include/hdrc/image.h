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

#ifndef HDRC_IMAGE_H_
#define HDRC_IMAGE_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "hdrc/tensor.h"

namespace hdrc {

// H x W x 3 interleaved RGB samples.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * width_;
  }
  bool empty() const { return pixel_count() == 0; }

  double& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  double at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // [1, 3, H, W] planar copy and its inverse.
  Tensor to_tensor() const;
  static Image from_tensor(const Tensor& t, int batch_index = 0);

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Single-channel H x W map (luminance, weights).
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int h, int w, double fill = 0.0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}
  double& at(int y, int x) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  double at(int y, int x) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// Linear relative radiance.
struct HdrImage {
  Image pixels;
  // Assumed maximum scene luminance in cd/m^2, in [1, 1e9] when set.
  std::optional<double> calib_max_luminance;
  // Factor applied by preprocess().
  std::optional<double> scale_applied;
};

// Display-encoded signal in [0, 1].
struct LdrImage {
  Image pixels;
};

}  // namespace hdrc

#endif  // HDRC_IMAGE_H_
