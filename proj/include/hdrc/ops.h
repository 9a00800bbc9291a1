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

#ifndef HDRC_OPS_H_
#define HDRC_OPS_H_

#include <span>
#include <vector>

#include "hdrc/autograd.h"

// Differentiable tensor operations on NCHW Vars. Binary arithmetic broadcasts
// any operand dimension of extent 1. Spatial filters use mirror (reflect-101)
// boundaries and preserve the input extent.
namespace hdrc::ag {

Var constant(Tensor value);
Var scalar(double value);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var add_scalar(const Var& x, double s);
Var mul_scalar(const Var& x, double s);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }
inline Var operator+(const Var& a, double s) { return add_scalar(a, s); }
inline Var operator-(const Var& a, double s) { return add_scalar(a, -s); }
inline Var operator*(const Var& a, double s) { return mul_scalar(a, s); }
inline Var operator*(double s, const Var& a) { return mul_scalar(a, s); }

Var neg(const Var& x);
Var exp(const Var& x);
Var log(const Var& x);
Var softplus(const Var& x);
Var sigmoid(const Var& x);
Var tanh(const Var& x);
// x * Phi(x).
Var gelu(const Var& x);
Var abs(const Var& x);
Var square(const Var& x);
// x^p for x >= 0; the gradient at x == 0 is taken as 0.
Var pow_scalar(const Var& x, double p);
// Values outside [lo, hi] are clamped and receive zero gradient.
Var clamp(const Var& x, double lo, double hi);
// max(x, lo).
Var floor_at(const Var& x, double lo);
// Standard normal cumulative distribution.
Var normal_cdf(const Var& x);

// Reductions to a [1,1,1,1] scalar.
Var sum(const Var& x);
Var mean(const Var& x);

// 2-D convolution. w: [Cout, Cin, k, k]; bias: [1, Cout, 1, 1] or undefined.
// Zero padding of `pad` pixels on every side.
Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad);

// [N, C*r*r, H, W] -> [N, C, H*r, W*r].
Var pixel_shuffle(const Var& x, int r);

Var concat_channels(const std::vector<Var>& parts);
Var slice_channels(const Var& x, int begin, int end);
Var crop(const Var& x, int top, int left, int height, int width);
// Extends x to out_h x out_w, placing the original at (top, left) and filling
// the rest by mirror reflection (valid for any extent, including 1).
Var pad_mirror(const Var& x, int top, int left, int out_h, int out_w);

// Weighted channel sum, [N, C, H, W] -> [N, 1, H, W].
Var channel_mix(const Var& x, std::span<const double> weights);
// Broadcast a [N, 1, H, W] tensor to C channels by repetition.
Var repeat_channels(const Var& x, int channels);

// Same-size separable filtering with odd-length taps, applied per channel.
Var filter_separable(const Var& x, std::span<const double> taps);
// Same-size 2-D filtering with a k x k kernel (row-major), per channel.
Var filter2d(const Var& x, std::span<const double> kernel, int k);
// Keeps even rows/columns: out extent is ceil(h/2) x ceil(w/2).
Var downsample2(const Var& x);
// Places x at even positions of an out_h x out_w zero grid.
Var upsample2(const Var& x, int out_h, int out_w);

int mirror_index(int i, int n);

// Scalar forms of the pointwise functions, for serial code paths that must
// agree with the graph ops.
double normal_cdf_value(double x);
double sigmoid_value(double x);
double softplus_value(double x);
double gelu_value(double x);

}  // namespace hdrc::ag

#endif  // HDRC_OPS_H_
