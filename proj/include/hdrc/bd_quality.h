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

#ifndef HDRC_BD_QUALITY_H_
#define HDRC_BD_QUALITY_H_

#include <span>
#include <string>
#include <vector>

namespace hdrc {

struct RdPoint {
  double bpp = 0.0;
  double quality = 0.0;
  std::string metric;
  std::string image_id;
};

struct RdCurve {
  std::vector<RdPoint> points;

  // Sorts by bpp; throws ParameterError unless there are >= 2 points with
  // positive, strictly increasing bpp.
  void normalize();
};

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
// the standard three-point end conditions).
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  // Exact integral over [a, b] inside the data range.
  double integral(double a, double b) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::size_t segment(double x) const;
  // Integral from x_[k] to x within segment k.
  double partial(std::size_t k, double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

// Mean quality difference (test - anchor) over the common log10(bpp) range.
double bd_quality(const RdCurve& test, const RdCurve& anchor);

}  // namespace hdrc

#endif  // HDRC_BD_QUALITY_H_
