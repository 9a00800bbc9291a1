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

#include "hdrc/bd_quality.h"

#include <algorithm>
#include <cmath>

#include "hdrc/errors.h"

namespace hdrc {
namespace {

double sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

void RdCurve::normalize() {
  if (points.size() < 2)
    throw ParameterError("an RD curve needs at least 2 points");
  std::sort(points.begin(), points.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.bpp < b.bpp; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].bpp > 0) || !std::isfinite(points[i].quality)) {
      throw ParameterError("RD points need positive bpp and finite quality");
    }
    if (i > 0 && !(points[i].bpp > points[i - 1].bpp)) {
      throw ParameterError("RD curve bpp values must be distinct");
    }
  }
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw ParameterError("interpolation needs >= 2 points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw ParameterError("abscissae must increase");
  }
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(d) != sign(m0)) {
      d = 0.0;
    } else if (sign(m0) != sign(m1) && std::fabs(d) > 3.0 * std::fabs(m0)) {
      d = 3.0 * m0;
    }
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t Pchip::segment(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k =
      it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double Pchip::operator()(double x) const {
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return y_[k] * (2 * t3 - 3 * t2 + 1) + h * d_[k] * (t3 - 2 * t2 + t) +
         y_[k + 1] * (-2 * t3 + 3 * t2) + h * d_[k + 1] * (t3 - t2);
}

double Pchip::partial(std::size_t k, double x) const {
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double h00 = t - t3 + t4 / 2.0;
  const double h10 = t2 / 2.0 - 2.0 * t3 / 3.0 + t4 / 4.0;
  const double h01 = t3 - t4 / 2.0;
  const double h11 = -t3 / 3.0 + t4 / 4.0;
  return h * (y_[k] * h00 + h * d_[k] * h10 + y_[k + 1] * h01 +
              h * d_[k + 1] * h11);
}

double Pchip::integral(double a, double b) const {
  if (a < x_.front() || b > x_.back() || a > b) {
    throw ParameterError("integration range outside the data");
  }
  const std::size_t ka = segment(a);
  const std::size_t kb = segment(b);
  if (ka == kb) return partial(ka, b) - partial(ka, a);
  double total = partial(ka, x_[ka + 1]) - partial(ka, a);
  for (std::size_t k = ka + 1; k < kb; ++k) total += partial(k, x_[k + 1]);
  return total + partial(kb, b);
}

double bd_quality(const RdCurve& test, const RdCurve& anchor) {
  RdCurve t = test;
  RdCurve a = anchor;
  t.normalize();
  a.normalize();
  auto fit = [](const RdCurve& c) {
    std::vector<double> x;
    std::vector<double> y;
    for (const RdPoint& p : c.points) {
      x.push_back(std::log10(p.bpp));
      y.push_back(p.quality);
    }
    return Pchip(std::move(x), std::move(y));
  };
  const Pchip pt = fit(t);
  const Pchip pa = fit(a);
  const double lo = std::max(pt.x_min(), pa.x_min());
  const double hi = std::min(pt.x_max(), pa.x_max());
  if (!(hi > lo)) throw ParameterError("RD curves have no rate overlap");
  return (pt.integral(lo, hi) - pa.integral(lo, hi)) / (hi - lo);
}

}  // namespace hdrc
