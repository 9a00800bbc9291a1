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

#include "hdrc/ops.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "hdrc/random.h"

namespace hdrc::ag {
namespace {

Tensor random_tensor(const Shape& s, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0) {
  Rng rng(seed);
  Tensor t(s);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Compares the analytic gradient of sum(f(x) * probe) with central differences.
void check_gradient(const std::function<Var(const Var&)>& f, Tensor x0,
                    double tol = 1e-6) {
  Var x(x0, true);
  const Var y0 = f(x);
  const Tensor probe = random_tensor(y0.shape(), 99);
  auto objective = [&](const Var& in) {
    return sum(mul(f(in), constant(probe)));
  };
  const Var out = objective(x);
  out.backward();
  const Tensor g = x.grad();
  const double h = 1e-6;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    Tensor xp = x0;
    Tensor xm = x0;
    xp[i] += h;
    xm[i] -= h;
    NoGradGuard guard;
    const double fd =
        (objective(constant(xp)).item() - objective(constant(xm)).item()) /
        (2 * h);
    EXPECT_NEAR(g[i], fd, tol * std::max(1.0, std::abs(fd))) << "index " << i;
  }
}

TEST(OpsGradientTest, Pointwise) {
  const Tensor x = random_tensor(Shape{2, 2, 3, 3}, 1);
  check_gradient([](const Var& v) { return exp(v); }, x);
  check_gradient([](const Var& v) { return softplus(v); }, x);
  check_gradient([](const Var& v) { return sigmoid(v); }, x);
  check_gradient([](const Var& v) { return tanh(v); }, x);
  check_gradient([](const Var& v) { return gelu(v); }, x);
  check_gradient([](const Var& v) { return square(v); }, x);
  check_gradient([](const Var& v) { return normal_cdf(v); }, x);
  check_gradient([](const Var& v) { return abs(v); }, x);
  const Tensor pos = random_tensor(Shape{1, 2, 3, 3}, 2, 0.1, 2.0);
  check_gradient([](const Var& v) { return log(v); }, pos);
  check_gradient([](const Var& v) { return pow_scalar(v, 1.0 / 2.6); }, pos);
}

TEST(OpsGradientTest, BroadcastArithmetic) {
  const Tensor b = random_tensor(Shape{1, 3, 1, 1}, 3, 0.5, 1.5);
  const Tensor x = random_tensor(Shape{2, 3, 2, 2}, 4);
  check_gradient([&](const Var& v) { return add(v, constant(b)); }, x);
  check_gradient([&](const Var& v) { return div(v, constant(b)); }, x);
  check_gradient(
      [&](const Var& v) {
        return div(constant(x), add_scalar(square(v), 1.0));
      },
      b);
  check_gradient([&](const Var& v) { return mul(constant(x), v); }, b);
}

TEST(OpsGradientTest, Convolution) {
  const Tensor w = random_tensor(Shape{4, 3, 3, 3}, 5);
  const Tensor bias = random_tensor(Shape{1, 4, 1, 1}, 6);
  const Tensor x = random_tensor(Shape{2, 3, 5, 6}, 7);
  for (int stride : {1, 2}) {
    check_gradient(
        [&](const Var& v) {
          return conv2d(v, constant(w), constant(bias), stride, 1);
        },
        x);
    check_gradient(
        [&](const Var& v) {
          return conv2d(constant(x), v, constant(bias), stride, 1);
        },
        w);
    check_gradient(
        [&](const Var& v) {
          return conv2d(constant(x), constant(w), v, stride, 1);
        },
        bias);
  }
}

TEST(OpsGradientTest, SpatialOps) {
  const Tensor x = random_tensor(Shape{1, 2, 5, 7}, 8);
  const double taps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  check_gradient([&](const Var& v) { return filter_separable(v, taps); }, x);
  std::vector<double> k(25);
  for (int i = 0; i < 25; ++i) k[i] = 0.01 * (i + 1);
  check_gradient([&](const Var& v) { return filter2d(v, k, 5); }, x);
  check_gradient([](const Var& v) { return downsample2(v); }, x);
  check_gradient([](const Var& v) { return upsample2(v, 9, 13); }, x);
  check_gradient([](const Var& v) { return pad_mirror(v, 1, 2, 8, 12); }, x);
  check_gradient([](const Var& v) { return crop(v, 1, 2, 3, 4); }, x);
  check_gradient([](const Var& v) { return pixel_shuffle(v, 1); }, x);
  const Tensor y = random_tensor(Shape{1, 8, 2, 3}, 9);
  check_gradient([](const Var& v) { return pixel_shuffle(v, 2); }, y);
  check_gradient([](const Var& v) { return slice_channels(v, 2, 5); }, y);
  check_gradient([](const Var& v) { return concat_channels({v, square(v)}); },
                 y);
  const double mix[3] = {0.2126, 0.7152, 0.0722};
  const Tensor rgb = random_tensor(Shape{2, 3, 2, 2}, 10);
  check_gradient([&](const Var& v) { return channel_mix(v, mix); }, rgb);
  check_gradient([](const Var& v) { return repeat_channels(v, 3); },
                 random_tensor(Shape{2, 1, 2, 2}, 11));
  check_gradient([](const Var& v) { return mean(v); }, x);
}

TEST(OpsTest, ConvolutionMatchesDirectLoops) {
  const Tensor w = random_tensor(Shape{3, 2, 3, 3}, 12);
  const Tensor x = random_tensor(Shape{1, 2, 6, 5}, 13);
  for (int stride : {1, 2}) {
    NoGradGuard guard;
    const Tensor y = conv2d(constant(x), constant(w), Var(), stride, 1).value();
    const int oh = (6 + 2 - 3) / stride + 1;
    const int ow = (5 + 2 - 3) / stride + 1;
    ASSERT_EQ(y.shape().h, oh);
    ASSERT_EQ(y.shape().w, ow);
    for (int o = 0; o < 3; ++o) {
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          double acc = 0.0;
          for (int c = 0; c < 2; ++c) {
            for (int di = 0; di < 3; ++di) {
              for (int dj = 0; dj < 3; ++dj) {
                const int yy = i * stride + di - 1;
                const int xx = j * stride + dj - 1;
                if (yy < 0 || yy >= 6 || xx < 0 || xx >= 5) continue;
                acc += w.at(o, c, di, dj) * x.at(0, c, yy, xx);
              }
            }
          }
          EXPECT_NEAR(y.at(0, o, i, j), acc, 1e-12);
        }
      }
    }
  }
}

TEST(OpsTest, MirrorIndexReflectsWithoutRepeatingEdge) {
  EXPECT_EQ(mirror_index(-1, 5), 1);
  EXPECT_EQ(mirror_index(-2, 5), 2);
  EXPECT_EQ(mirror_index(5, 5), 3);
  EXPECT_EQ(mirror_index(6, 5), 2);
  EXPECT_EQ(mirror_index(3, 1), 0);
}

TEST(OpsTest, ClampHasZeroGradientOutside) {
  Var x(Tensor(Shape{1, 1, 1, 3}, {-0.5, 0.5, 1.5}), true);
  sum(clamp(x, 0.0, 1.0)).backward();
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 1.0);
  EXPECT_EQ(x.grad()[2], 0.0);
}

TEST(OpsTest, ScalarFormsAgreeWithGraphOps) {
  NoGradGuard guard;
  for (double v : {-30.0, -2.0, -0.1, 0.0, 0.3, 4.0, 40.0}) {
    const Var x = scalar(v);
    EXPECT_EQ(softplus(x).item(), softplus_value(v));
    EXPECT_EQ(sigmoid(x).item(), sigmoid_value(v));
    EXPECT_EQ(gelu(x).item(), gelu_value(v));
    EXPECT_EQ(normal_cdf(x).item(), normal_cdf_value(v));
    EXPECT_NEAR(normal_cdf_value(v), 0.5 * std::erfc(-v / std::sqrt(2.0)),
                1e-15);
  }
}

TEST(OpsTest, NoGradGuardRecordsNothing) {
  Var x(Tensor(Shape{1, 1, 1, 1}, {2.0}), true);
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    const Var y = square(x);
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_TRUE(grad_enabled());
}

}  // namespace
}  // namespace hdrc::ag
