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

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hdrc/errors.h"

namespace hdrc::ag {
namespace {

using MatR =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double phi_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
double phi_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Shape broadcast_shape(const Shape& a, const Shape& b) {
  auto dim = [&](int x, int y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    throw ShapeError("cannot broadcast " + a.str() + " with " + b.str());
  };
  return {dim(a.n, b.n), dim(a.c, b.c), dim(a.h, b.h), dim(a.w, b.w)};
}

struct Strides {
  std::size_t n, c, h, w;
};

Strides broadcast_strides(const Shape& s) {
  const std::size_t sw = 1;
  const std::size_t sh = static_cast<std::size_t>(s.w);
  const std::size_t sc = sh * s.h;
  const std::size_t sn = sc * s.c;
  return {s.n > 1 ? sn : 0, s.c > 1 ? sc : 0, s.h > 1 ? sh : 0,
          s.w > 1 ? sw : 0};
}

// Visits every output element with the matching (broadcast) input offsets.
template <typename F>
void for_each_broadcast(const Shape& out, const Shape& a, const Shape& b,
                        F&& f) {
  if (a == out && b == out) {
    for (std::size_t i = 0; i < out.size(); ++i) f(i, i, i);
    return;
  }
  const Strides sa = broadcast_strides(a);
  const Strides sb = broadcast_strides(b);
  std::size_t i = 0;
  for (int n = 0; n < out.n; ++n) {
    for (int c = 0; c < out.c; ++c) {
      for (int h = 0; h < out.h; ++h) {
        const std::size_t ra = n * sa.n + c * sa.c + h * sa.h;
        const std::size_t rb = n * sb.n + c * sb.c + h * sb.h;
        for (int w = 0; w < out.w; ++w, ++i) {
          f(i, ra + w * sa.w, rb + w * sb.w);
        }
      }
    }
  }
}

// f(a, b) -> value; da(a, b) and db(a, b) -> partial derivatives.
template <typename F, typename DA, typename DB>
Var binary(const Var& a, const Var& b, F f, DA da, DB db) {
  const Shape out_shape = broadcast_shape(a.shape(), b.shape());
  Tensor out(out_shape);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for_each_broadcast(out_shape, av.shape(), bv.shape(),
                     [&](std::size_t i, std::size_t ia, std::size_t ib) {
                       out[i] = f(av[ia], bv[ib]);
                     });
  return make_result(std::move(out), {a, b}, [da, db](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const Tensor& g = self.grad;
    const Tensor& av = na.value;
    const Tensor& bv = nb.value;
    Tensor* ga = na.requires_grad ? &na.ensure_grad() : nullptr;
    Tensor* gb = nb.requires_grad ? &nb.ensure_grad() : nullptr;
    for_each_broadcast(self.value.shape(), av.shape(), bv.shape(),
                       [&](std::size_t i, std::size_t ia, std::size_t ib) {
                         if (ga) (*ga)[ia] += g[i] * da(av[ia], bv[ib]);
                         if (gb) (*gb)[ib] += g[i] * db(av[ia], bv[ib]);
                       });
  });
}

// f(x) -> y; df(x, y) -> dy/dx.
template <typename F, typename DF>
Var unary(const Var& x, F f, DF df) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return make_result(std::move(out), {x}, [df](Node& self) {
    Node& in = *self.inputs[0];
    Tensor& gx = in.ensure_grad();
    const Tensor& g = self.grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      gx[i] += g[i] * df(in.value[i], self.value[i]);
    }
  });
}

void im2col(const double* x, int channels, int height, int width, int k,
            int stride, int pad, int out_h, int out_w, double* col) {
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* dst =
            col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          double* row = dst + static_cast<std::size_t>(oy) * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(row, row + out_w, 0.0);
            continue;
          }
          const double* src =
              x + (static_cast<std::size_t>(c) * height + iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            row[ox] = (ix >= 0 && ix < width) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* col, int channels, int height, int width, int k,
            int stride, int pad, int out_h, int out_w, double* x) {
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* src =
            col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) continue;
          const double* row = src + static_cast<std::size_t>(oy) * out_w;
          double* dst = x + (static_cast<std::size_t>(c) * height + iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < width) dst[ix] += row[ox];
          }
        }
      }
    }
  }
}

// 1-D mirror filter along a strided line: dst[i] = sum_t taps[t] src[m(i+t-r)].
void filter_line(const double* src, double* dst, int n, std::size_t stride,
                 std::span<const double> taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int t = 0; t < static_cast<int>(taps.size()); ++t) {
      acc += taps[t] * src[mirror_index(i + t - r, n) * stride];
    }
    dst[i * stride] = acc;
  }
}

// Adjoint of filter_line, accumulated into dst.
void filter_line_adjoint(const double* g, double* dst, int n,
                         std::size_t stride, std::span<const double> taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  for (int i = 0; i < n; ++i) {
    const double gi = g[i * stride];
    for (int t = 0; t < static_cast<int>(taps.size()); ++t) {
      dst[mirror_index(i + t - r, n) * stride] += taps[t] * gi;
    }
  }
}

void separable_plane(const double* src, double* dst, double* tmp, int h, int w,
                     std::span<const double> taps) {
  for (int y = 0; y < h; ++y) {
    filter_line(src + static_cast<std::size_t>(y) * w,
                tmp + static_cast<std::size_t>(y) * w, w, 1, taps);
  }
  for (int x = 0; x < w; ++x) filter_line(tmp + x, dst + x, h, w, taps);
}

}  // namespace

int mirror_index(int i, int n) {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

double normal_cdf_value(double x) { return phi_cdf(x); }
double sigmoid_value(double x) { return stable_sigmoid(x); }
double softplus_value(double x) { return stable_softplus(x); }
double gelu_value(double x) { return x * phi_cdf(x); }

Var constant(Tensor value) { return Var(std::move(value), false); }

Var scalar(double value) { return Var(Tensor(Shape{}, value), false); }

Var add(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Var div(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Var add_scalar(const Var& x, double s) {
  return unary(
      x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Var mul_scalar(const Var& x, double s) {
  return unary(
      x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Var neg(const Var& x) { return mul_scalar(x, -1.0); }

Var exp(const Var& x) {
  return unary(
      x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Var log(const Var& x) {
  return unary(
      x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Var softplus(const Var& x) {
  return unary(x, stable_softplus,
               [](double v, double) { return stable_sigmoid(v); });
}

Var sigmoid(const Var& x) {
  return unary(x, stable_sigmoid,
               [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& x) {
  return unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var gelu(const Var& x) {
  return unary(
      x, [](double v) { return v * phi_cdf(v); },
      [](double v, double) { return phi_cdf(v) + v * phi_pdf(v); });
}

Var abs(const Var& x) {
  return unary(
      x, [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
}

Var square(const Var& x) {
  return unary(
      x, [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

Var pow_scalar(const Var& x, double p) {
  return unary(
      x, [p](double v) { return v > 0 ? std::pow(v, p) : 0.0; },
      [p](double v, double y) { return v > 0 ? p * y / v : 0.0; });
}

Var clamp(const Var& x, double lo, double hi) {
  return unary(
      x, [lo, hi](double v) { return std::min(hi, std::max(lo, v)); },
      [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Var floor_at(const Var& x, double lo) {
  return unary(
      x, [lo](double v) { return v > lo ? v : lo; },
      [lo](double v, double) { return v > lo ? 1.0 : 0.0; });
}

Var normal_cdf(const Var& x) {
  return unary(x, phi_cdf, [](double v, double) { return phi_pdf(v); });
}

Var sum(const Var& x) {
  Tensor out(Shape{}, x.value().sum());
  return make_result(std::move(out), {x}, [](Node& self) {
    Node& in = *self.inputs[0];
    Tensor& gx = in.ensure_grad();
    const double g = self.grad[0];
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var mean(const Var& x) {
  const double n = static_cast<double>(x.value().size());
  return mul_scalar(sum(x), 1.0 / n);
}

Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad) {
  const Shape xs = x.shape();
  const Shape ws = w.shape();
  if (ws.c != xs.c || ws.h != ws.w) {
    throw ShapeError("conv2d: input " + xs.str() + " vs weight " + ws.str());
  }
  const int k = ws.h;
  const int out_h = (xs.h + 2 * pad - k) / stride + 1;
  const int out_w = (xs.w + 2 * pad - k) / stride + 1;
  if (out_h <= 0 || out_w <= 0) {
    throw ShapeError("conv2d: empty output for input " + xs.str());
  }
  const int cout = ws.n;
  const int kdim = xs.c * k * k;
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  const bool direct = (k == 1 && stride == 1 && pad == 0);

  Tensor out(Shape{xs.n, cout, out_h, out_w});
  std::vector<double> col(direct ? 0
                                 : static_cast<std::size_t>(kdim) * out_plane);
  const CMapR wm(w.value().data(), cout, kdim);
  for (int n = 0; n < xs.n; ++n) {
    const double* colp = x.value().plane(n, 0);
    if (!direct) {
      im2col(x.value().plane(n, 0), xs.c, xs.h, xs.w, k, stride, pad, out_h,
             out_w, col.data());
      colp = col.data();
    }
    const CMapR cm(colp, kdim, out_plane);
    MapR om(out.plane(n, 0), cout, out_plane);
    om.noalias() = wm * cm;
    if (bias.defined()) {
      for (int o = 0; o < cout; ++o) om.row(o).array() += bias.value()[o];
    }
  }

  std::vector<Var> inputs{x, w};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(
      std::move(out), inputs,
      [stride, pad, k, out_h, out_w, kdim, out_plane, direct](Node& self) {
        Node& nx = *self.inputs[0];
        Node& nw = *self.inputs[1];
        Node* nb = self.inputs.size() > 2 ? self.inputs[2].get() : nullptr;
        const Shape xs = nx.value.shape();
        const int cout = nw.value.shape().n;
        const CMapR wm(nw.value.data(), cout, kdim);
        std::vector<double> col(
            direct ? 0 : static_cast<std::size_t>(kdim) * out_plane);
        std::vector<double> gcol(static_cast<std::size_t>(kdim) * out_plane);
        for (int n = 0; n < xs.n; ++n) {
          const CMapR gm(self.grad.plane(n, 0), cout, out_plane);
          if (nw.requires_grad) {
            const double* colp = nx.value.plane(n, 0);
            if (!direct) {
              im2col(nx.value.plane(n, 0), xs.c, xs.h, xs.w, k, stride, pad,
                     out_h, out_w, col.data());
              colp = col.data();
            }
            const CMapR cm(colp, kdim, out_plane);
            MapR gw(nw.ensure_grad().data(), cout, kdim);
            gw.noalias() += gm * cm.transpose();
          }
          if (nb && nb->requires_grad) {
            Tensor& gb = nb->ensure_grad();
            for (int o = 0; o < cout; ++o) gb[o] += gm.row(o).sum();
          }
          if (nx.requires_grad) {
            Tensor& gx = nx.ensure_grad();
            if (direct) {
              MapR gxm(gx.plane(n, 0), kdim, out_plane);
              gxm.noalias() += wm.transpose() * gm;
            } else {
              MapR gc(gcol.data(), kdim, out_plane);
              gc.noalias() = wm.transpose() * gm;
              col2im(gcol.data(), xs.c, xs.h, xs.w, k, stride, pad, out_h,
                     out_w, gx.plane(n, 0));
            }
          }
        }
      });
}

Var pixel_shuffle(const Var& x, int r) {
  const Shape s = x.shape();
  if (s.c % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channels " + std::to_string(s.c) +
                     " not divisible by " + std::to_string(r * r));
  }
  const Shape os{s.n, s.c / (r * r), s.h * r, s.w * r};
  auto src_index = [s, r](int n, int c, int y, int x) {
    const int sc = c * r * r + (y % r) * r + (x % r);
    return ((static_cast<std::size_t>(n) * s.c + sc) * s.h + y / r) * s.w +
           x / r;
  };
  Tensor out(os);
  std::size_t i = 0;
  for (int n = 0; n < os.n; ++n)
    for (int c = 0; c < os.c; ++c)
      for (int y = 0; y < os.h; ++y)
        for (int xx = 0; xx < os.w; ++xx, ++i)
          out[i] = x.value()[src_index(n, c, y, xx)];
  return make_result(std::move(out), {x}, [src_index, os](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    std::size_t i = 0;
    for (int n = 0; n < os.n; ++n)
      for (int c = 0; c < os.c; ++c)
        for (int y = 0; y < os.h; ++y)
          for (int xx = 0; xx < os.w; ++xx, ++i)
            gx[src_index(n, c, y, xx)] += self.grad[i];
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  Shape os = parts[0].shape();
  os.c = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    if (s.n != os.n || s.h != os.h || s.w != os.w) {
      throw ShapeError("concat_channels: " + parts[0].shape().str() + " vs " +
                       s.str());
    }
    os.c += s.c;
  }
  Tensor out(os);
  const std::size_t plane = os.plane();
  for (int n = 0; n < os.n; ++n) {
    int offset = 0;
    for (const Var& p : parts) {
      const int c = p.shape().c;
      std::copy(p.value().plane(n, 0), p.value().plane(n, 0) + c * plane,
                out.plane(n, offset));
      offset += c;
    }
  }
  return make_result(std::move(out), parts, [plane](Node& self) {
    const int batch = self.value.shape().n;
    for (int n = 0; n < batch; ++n) {
      int offset = 0;
      for (auto& in : self.inputs) {
        const int c = in->value.shape().c;
        if (in->requires_grad) {
          double* dst = in->ensure_grad().plane(n, 0);
          const double* src = self.grad.plane(n, offset);
          for (std::size_t i = 0; i < c * plane; ++i) dst[i] += src[i];
        }
        offset += c;
      }
    }
  });
}

Var slice_channels(const Var& x, int begin, int end) {
  const Shape s = x.shape();
  if (begin < 0 || end > s.c || begin >= end) {
    throw ShapeError("slice_channels: [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") of " + s.str());
  }
  const Shape os{s.n, end - begin, s.h, s.w};
  Tensor out(os);
  const std::size_t len = static_cast<std::size_t>(os.c) * s.plane();
  for (int n = 0; n < s.n; ++n) {
    std::copy(x.value().plane(n, begin), x.value().plane(n, begin) + len,
              out.plane(n, 0));
  }
  return make_result(std::move(out), {x}, [begin, len](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    for (int n = 0; n < self.value.shape().n; ++n) {
      double* dst = gx.plane(n, begin);
      const double* src = self.grad.plane(n, 0);
      for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
    }
  });
}

Var crop(const Var& x, int top, int left, int height, int width) {
  const Shape s = x.shape();
  if (top < 0 || left < 0 || height <= 0 || width <= 0 || top + height > s.h ||
      left + width > s.w) {
    throw ShapeError("crop out of range for " + s.str());
  }
  if (top == 0 && left == 0 && height == s.h && width == s.w) return x;
  const Shape os{s.n, s.c, height, width};
  Tensor out(os);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < height; ++y)
        for (int xx = 0; xx < width; ++xx)
          out.at(n, c, y, xx) = x.value().at(n, c, y + top, xx + left);
  return make_result(std::move(out), {x}, [top, left](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& os = self.value.shape();
    for (int n = 0; n < os.n; ++n)
      for (int c = 0; c < os.c; ++c)
        for (int y = 0; y < os.h; ++y)
          for (int xx = 0; xx < os.w; ++xx)
            gx.at(n, c, y + top, xx + left) += self.grad.at(n, c, y, xx);
  });
}

Var pad_mirror(const Var& x, int top, int left, int out_h, int out_w) {
  const Shape s = x.shape();
  if (top < 0 || left < 0 || out_h < top + s.h || out_w < left + s.w) {
    throw ShapeError("pad_mirror: bad geometry for " + s.str());
  }
  if (top == 0 && left == 0 && out_h == s.h && out_w == s.w) return x;
  const Shape os{s.n, s.c, out_h, out_w};
  Tensor out(os);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < out_h; ++y) {
        const int sy = mirror_index(y - top, s.h);
        for (int xx = 0; xx < out_w; ++xx) {
          out.at(n, c, y, xx) =
              x.value().at(n, c, sy, mirror_index(xx - left, s.w));
        }
      }
  return make_result(std::move(out), {x}, [top, left](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& is = gx.shape();
    const Shape& os = self.value.shape();
    for (int n = 0; n < os.n; ++n)
      for (int c = 0; c < os.c; ++c)
        for (int y = 0; y < os.h; ++y) {
          const int sy = mirror_index(y - top, is.h);
          for (int xx = 0; xx < os.w; ++xx) {
            gx.at(n, c, sy, mirror_index(xx - left, is.w)) +=
                self.grad.at(n, c, y, xx);
          }
        }
  });
}

Var channel_mix(const Var& x, std::span<const double> weights) {
  const Shape s = x.shape();
  if (static_cast<int>(weights.size()) != s.c) {
    throw ShapeError("channel_mix: weight count vs " + s.str());
  }
  std::vector<double> wts(weights.begin(), weights.end());
  Tensor out(Shape{s.n, 1, s.h, s.w});
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    double* dst = out.plane(n, 0);
    for (int c = 0; c < s.c; ++c) {
      const double* src = x.value().plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) dst[i] += wts[c] * src[i];
    }
  }
  return make_result(std::move(out), {x}, [wts, plane](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& s = gx.shape();
    for (int n = 0; n < s.n; ++n) {
      const double* g = self.grad.plane(n, 0);
      for (int c = 0; c < s.c; ++c) {
        double* dst = gx.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) dst[i] += wts[c] * g[i];
      }
    }
  });
}

Var repeat_channels(const Var& x, int channels) {
  const Shape s = x.shape();
  if (s.c != 1) throw ShapeError("repeat_channels expects one channel");
  Tensor out(Shape{s.n, channels, s.h, s.w});
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < channels; ++c)
      std::copy(x.value().plane(n, 0), x.value().plane(n, 0) + plane,
                out.plane(n, c));
  return make_result(std::move(out), {x}, [plane](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& os = self.value.shape();
    for (int n = 0; n < os.n; ++n) {
      double* dst = gx.plane(n, 0);
      for (int c = 0; c < os.c; ++c) {
        const double* g = self.grad.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) dst[i] += g[i];
      }
    }
  });
}

Var filter_separable(const Var& x, std::span<const double> taps) {
  if (taps.size() % 2 == 0) throw ShapeError("filter taps must be odd");
  std::vector<double> k(taps.begin(), taps.end());
  const Shape s = x.shape();
  Tensor out(s);
  std::vector<double> tmp(s.plane());
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      separable_plane(x.value().plane(n, c), out.plane(n, c), tmp.data(), s.h,
                      s.w, k);
  return make_result(std::move(out), {x}, [k](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& s = gx.shape();
    std::vector<double> tmp(s.plane());
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        // Forward was vertical(horizontal(x)); adjoint runs in reverse.
        std::fill(tmp.begin(), tmp.end(), 0.0);
        const double* g = self.grad.plane(n, c);
        for (int xx = 0; xx < s.w; ++xx)
          filter_line_adjoint(g + xx, tmp.data() + xx, s.h, s.w, k);
        double* dst = gx.plane(n, c);
        for (int y = 0; y < s.h; ++y)
          filter_line_adjoint(tmp.data() + static_cast<std::size_t>(y) * s.w,
                              dst + static_cast<std::size_t>(y) * s.w, s.w, 1,
                              k);
      }
  });
}

Var filter2d(const Var& x, std::span<const double> kernel, int k) {
  if (k % 2 == 0 || static_cast<int>(kernel.size()) != k * k) {
    throw ShapeError("filter2d: kernel must be odd k*k");
  }
  std::vector<double> kv(kernel.begin(), kernel.end());
  const int r = k / 2;
  const Shape s = x.shape();
  Tensor out(s);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const double* src = x.value().plane(n, c);
      double* dst = out.plane(n, c);
      for (int y = 0; y < s.h; ++y)
        for (int xx = 0; xx < s.w; ++xx) {
          double acc = 0.0;
          for (int a = 0; a < k; ++a) {
            const int sy = mirror_index(y + a - r, s.h);
            for (int b = 0; b < k; ++b) {
              acc += kv[a * k + b] * src[static_cast<std::size_t>(sy) * s.w +
                                         mirror_index(xx + b - r, s.w)];
            }
          }
          dst[static_cast<std::size_t>(y) * s.w + xx] = acc;
        }
    }
  return make_result(std::move(out), {x}, [kv, k, r](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& s = gx.shape();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const double* g = self.grad.plane(n, c);
        double* dst = gx.plane(n, c);
        for (int y = 0; y < s.h; ++y)
          for (int xx = 0; xx < s.w; ++xx) {
            const double gi = g[static_cast<std::size_t>(y) * s.w + xx];
            for (int a = 0; a < k; ++a) {
              const int sy = mirror_index(y + a - r, s.h);
              for (int b = 0; b < k; ++b) {
                dst[static_cast<std::size_t>(sy) * s.w +
                    mirror_index(xx + b - r, s.w)] += kv[a * k + b] * gi;
              }
            }
          }
      }
  });
}

Var downsample2(const Var& x) {
  const Shape s = x.shape();
  const Shape os{s.n, s.c, (s.h + 1) / 2, (s.w + 1) / 2};
  Tensor out(os);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < os.h; ++y)
        for (int xx = 0; xx < os.w; ++xx)
          out.at(n, c, y, xx) = x.value().at(n, c, 2 * y, 2 * xx);
  return make_result(std::move(out), {x}, [](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& os = self.value.shape();
    for (int n = 0; n < os.n; ++n)
      for (int c = 0; c < os.c; ++c)
        for (int y = 0; y < os.h; ++y)
          for (int xx = 0; xx < os.w; ++xx)
            gx.at(n, c, 2 * y, 2 * xx) += self.grad.at(n, c, y, xx);
  });
}

Var upsample2(const Var& x, int out_h, int out_w) {
  const Shape s = x.shape();
  if ((out_h + 1) / 2 != s.h || (out_w + 1) / 2 != s.w) {
    throw ShapeError("upsample2: " + s.str() + " cannot fill " +
                     std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  Tensor out(Shape{s.n, s.c, out_h, out_w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y)
        for (int xx = 0; xx < s.w; ++xx)
          out.at(n, c, 2 * y, 2 * xx) = x.value().at(n, c, y, xx);
  return make_result(std::move(out), {x}, [](Node& self) {
    Tensor& gx = self.inputs[0]->ensure_grad();
    const Shape& s = gx.shape();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        for (int y = 0; y < s.h; ++y)
          for (int xx = 0; xx < s.w; ++xx)
            gx.at(n, c, y, xx) += self.grad.at(n, c, 2 * y, 2 * xx);
  });
}

}  // namespace hdrc::ag
