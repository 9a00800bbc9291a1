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

#include "hdrc/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hdrc/display_model.h"
#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "test_util.h"

namespace hdrc {
namespace {

using testing::random_hdr;
using testing::random_ldr;

// Direct-loop reference pyramid and distance, written independently of the
// library's separable graph ops.
using Grid = std::vector<std::vector<double>>;

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

Grid blur(const Grid& x, const double taps[5]) {
  const int h = static_cast<int>(x.size());
  const int w = static_cast<int>(x[0].size());
  Grid out(h, std::vector<double>(w, 0.0));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double acc = 0.0;
      for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) {
          acc += taps[a + 2] * taps[b + 2] *
                 x[reflect(i + a, h)][reflect(j + b, w)];
        }
      }
      out[i][j] = acc;
    }
  }
  return out;
}

double oracle_nlpd(const Plane& ref, const Plane& test, const NlpdConfig& cfg) {
  const double down_taps[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0,
                               1 / 16.0};
  const double up_taps[5] = {2 / 16.0, 8 / 16.0, 12 / 16.0, 8 / 16.0, 2 / 16.0};
  auto pyramid = [&](const Plane& lum) {
    Grid x(lum.height, std::vector<double>(lum.width));
    for (int i = 0; i < lum.height; ++i) {
      for (int j = 0; j < lum.width; ++j)
        x[i][j] = std::pow(lum.at(i, j), 1.0 / 2.6);
    }
    int levels = 1;
    for (int s = std::min(lum.height, lum.width); levels < 6;) {
      s = (s + 1) / 2;
      if (s < 8) break;
      ++levels;
    }
    std::vector<Grid> bands;
    for (int l = 0; l < levels; ++l) {
      const int h = static_cast<int>(x.size());
      const int w = static_cast<int>(x[0].size());
      Grid band = x;
      if (l + 1 < levels) {
        const Grid blurred = blur(x, down_taps);
        Grid down((h + 1) / 2, std::vector<double>((w + 1) / 2));
        for (int i = 0; i < (h + 1) / 2; ++i) {
          for (int j = 0; j < (w + 1) / 2; ++j)
            down[i][j] = blurred[2 * i][2 * j];
        }
        Grid zeros(h, std::vector<double>(w, 0.0));
        for (int i = 0; i < (h + 1) / 2; ++i) {
          for (int j = 0; j < (w + 1) / 2; ++j)
            zeros[2 * i][2 * j] = down[i][j];
        }
        const Grid up = blur(zeros, up_taps);
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) band[i][j] = x[i][j] - up[i][j];
        }
        x = down;
      }
      Grid norm = band;
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          double acc = 0.0;
          for (int a = -2; a <= 2; ++a) {
            for (int b = -2; b <= 2; ++b) {
              acc += cfg.dn_filter[(a + 2) * 5 + b + 2] *
                     std::abs(band[reflect(i + a, h)][reflect(j + b, w)]);
            }
          }
          norm[i][j] = band[i][j] / (cfg.dn_sigma + acc);
        }
      }
      bands.push_back(norm);
    }
    return bands;
  };
  const std::vector<Grid> a = pyramid(ref);
  const std::vector<Grid> b = pyramid(test);
  double total = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    double s = 0.0;
    for (std::size_t i = 0; i < a[l].size(); ++i) {
      for (std::size_t j = 0; j < a[l][0].size(); ++j)
        s += std::abs(a[l][i][j] - b[l][i][j]);
    }
    total += s / static_cast<double>(a[l].size() * a[l][0].size());
  }
  return total / static_cast<double>(a.size());
}

double oracle_ssim_channel(const Image& a, const Image& b, int c) {
  const int h = a.height();
  const int w = a.width();
  double g[11];
  double gs = 0.0;
  for (int i = 0; i < 11; ++i) {
    g[i] = std::exp(-(i - 5) * (i - 5) / (2 * 1.5 * 1.5));
    gs += g[i];
  }
  for (double& v : g) v /= gs;
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  double total = 0.0;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int p = -5; p <= 5; ++p) {
        for (int q = -5; q <= 5; ++q) {
          const double k = g[p + 5] * g[q + 5];
          const double va = a.at(reflect(i + p, h), reflect(j + q, w), c);
          const double vb = b.at(reflect(i + p, h), reflect(j + q, w), c);
          ma += k * va;
          mb += k * vb;
          saa += k * va * va;
          sbb += k * vb * vb;
          sab += k * va * vb;
        }
      }
      const double num = (2 * ma * mb + c1) * (2 * (sab - ma * mb) + c2);
      const double den =
          (ma * ma + mb * mb + c1) * (saa - ma * ma + sbb - mb * mb + c2);
      total += num / den;
    }
  }
  return total / (h * w);
}

Plane calibrated(const HdrImage& s, double l_max) {
  Plane p = luminance(s);
  for (double& v : p.data) v = std::max(v * l_max, kNlpdMinLuminance);
  return p;
}

TEST(NlpdTest, MatchesDirectLoopOracle) {
  for (auto [h, w] : {std::pair{16, 16}, {23, 37}, {64, 48}}) {
    const HdrImage s = preprocess(random_hdr(h * w, h, w));
    const LdrImage ldr = random_ldr(h + w, h, w);
    const double got = nlpd(s, 1e4, ldr);
    const double want =
        oracle_nlpd(calibrated(s, 1e4), display_render(ldr), NlpdConfig{});
    EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want)) << h << "x" << w;
  }
}

TEST(NlpdTest, BandCountAndConstantImage) {
  const NlpdConfig cfg;
  EXPECT_EQ(cfg.effective_levels(64, 64), 4);
  EXPECT_EQ(cfg.effective_levels(512, 512), 6);
  EXPECT_EQ(cfg.effective_levels(8, 100), 1);
  EXPECT_EQ(cfg.effective_levels(4, 4), 1);
  Plane flat(32, 32);
  std::fill(flat.data.begin(), flat.data.end(), 50.0);
  const std::vector<Plane> bands = nlp_transform(flat, cfg);
  ASSERT_EQ(bands.size(), 3u);
  for (std::size_t b = 0; b + 1 < bands.size(); ++b) {
    for (double v : bands[b].data) EXPECT_NEAR(v, 0.0, 1e-12);
  }
  for (double v : bands.back().data) EXPECT_GT(v, 0.0);
  Plane bad = flat;
  bad.data[3] = 0.0;
  EXPECT_THROW(nlp_transform(bad, cfg), ParameterError);
}

TEST(NlpdTest, ZeroForMatchingLuminanceAndNonNegative) {
  // A reference whose luminance is exactly what the display emits for V.
  const LdrImage v = random_ldr(5, 24, 24);
  const Plane emitted = display_render(v);
  Image s(24, 24);
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      for (int c = 0; c < 3; ++c) s.at(i, j, c) = emitted.at(i, j) / 300.0;
    }
  }
  const HdrImage ref{s, std::nullopt, std::nullopt};
  EXPECT_NEAR(nlpd(ref, 300.0, v), 0.0, 1e-12);
  for (int k = 0; k < 10; ++k) {
    EXPECT_GE(
        nlpd(preprocess(random_hdr(k, 16, 16)), 1e5, random_ldr(k, 16, 16)),
        0.0);
  }
}

TEST(NlpdTest, ShapeMismatchIsShapeError) {
  EXPECT_THROW(nlpd(random_hdr(1, 8, 8), 100, random_ldr(1, 8, 9)), ShapeError);
}

TEST(PsnrTest, CapAndLogReadOff) {
  const Image a(4, 4, 0.5);
  EXPECT_EQ(psnr(a, a), 100.0);
  Image b = a;
  for (double& v : b.data()) v += 0.1;
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-12);
  EXPECT_THROW(psnr(a, Image(4, 5, 0.0)), ShapeError);
}

TEST(SsimTest, MatchesWindowedOracleAndIsSymmetric) {
  const LdrImage a = random_ldr(1, 13, 17);
  LdrImage b = a;
  Rng rng(2);
  for (double& v : b.pixels.data())
    v = std::clamp(v + 0.1 * rng.normal(), 0.0, 1.0);
  double want = 0.0;
  for (int c = 0; c < 3; ++c)
    want += oracle_ssim_channel(a.pixels, b.pixels, c) / 3.0;
  EXPECT_NEAR(ssim(a.pixels, b.pixels), want, 1e-12);
  EXPECT_NEAR(ssim(a.pixels, b.pixels), ssim(b.pixels, a.pixels), 1e-14);
  EXPECT_NEAR(ssim(a.pixels, a.pixels), 1.0, 1e-12);
}

TEST(BaseMetricTest, PolarityAndLookup) {
  EXPECT_EQ(base_metric("psnr").polarity, Polarity::kHigherBetter);
  EXPECT_EQ(base_metric("ssim").optimal, 1.0);
  EXPECT_TRUE(psnr_metric().better(30, 20));
  EXPECT_THROW(base_metric("adists"), ParameterError);
}

TEST(DhTest, IdentitySumsOptimalValues) {
  const HdrImage s = preprocess(random_hdr(3, 16, 16));
  const std::vector<double> e = choose_exposures(s, 1e4, 4);
  EXPECT_EQ(d_H(s, s, 1e4, e, e, psnr_metric()), 400.0);
  EXPECT_NEAR(d_H(s, s, 1e4, e, e, ssim_metric()), 4.0, 1e-12);
}

TEST(DhTest, SingleExposureAndPermutation) {
  const HdrImage s = preprocess(random_hdr(4, 16, 16));
  HdrImage t = s;
  for (double& v : t.pixels.data()) v *= 1.2;
  const std::vector<double> e1 = {500.0};
  const double one = d_H(s, t, 1e4, e1, e1, psnr_metric());
  EXPECT_EQ(one, psnr(expose(s.pixels, 1e4, 500.0).pixels,
                      expose(t.pixels, 1e4, 500.0).pixels));
  const std::vector<double> e = {10.0, 100.0, 1000.0};
  const std::vector<double> p = {1000.0, 10.0, 100.0};
  EXPECT_NEAR(d_H(s, t, 1e4, e, e, ssim_metric()),
              d_H(s, t, 1e4, p, p, ssim_metric()), 1e-12);
  const std::vector<double> e2 = {10.0, 20.0};
  EXPECT_THROW(d_H(s, t, 1e4, e, e2, ssim_metric()), ParameterError);
}

TEST(DStarTest, IdentityIsOptimalAtReferenceExposures) {
  const HdrImage s = preprocess(random_hdr(5, 16, 16));
  const std::vector<double> e = choose_exposures(s, 1e5, 4);
  const DStarResult r = d_H_star(s, s, 1e5, e, psnr_metric());
  EXPECT_EQ(r.value, 400.0);
  for (std::size_t k = 0; k < e.size(); ++k)
    EXPECT_NEAR(r.exposures[k], e[k], 1e-6 * e[k]);
}

TEST(DStarTest, NeverWorseThanUnmatched) {
  for (int i = 0; i < 10; ++i) {
    const HdrImage s = preprocess(random_hdr(10 + i, 16, 16));
    HdrImage t = s;
    Rng rng(i);
    for (double& v : t.pixels.data())
      v = std::max(0.0, v * (1.0 + 0.3 * rng.normal()));
    const std::vector<double> e = choose_exposures(s, 1e5, 4);
    for (const BaseMetric& m : {psnr_metric(), ssim_metric()}) {
      EXPECT_GE(d_H_star(s, t, 1e5, e, m).value, d_H(s, t, 1e5, e, e, m));
    }
  }
}

TEST(DStarTest, AbsorbsGlobalScale) {
  const HdrImage s = preprocess(random_hdr(30, 24, 24));
  const std::vector<double> e = choose_exposures(s, 1e5, 4);
  const double base = d_H_star(s, s, 1e5, e, psnr_metric()).value;
  for (double c : {0.5, 1.5, 2.0}) {
    HdrImage t = s;
    for (double& v : t.pixels.data()) v *= c;
    EXPECT_NEAR(d_H_star(s, t, 1e5, e, psnr_metric()).value, base, 0.1) << c;
  }
}

TEST(MetricRecordTest, JsonLineRoundTrip) {
  const MetricRecord r{"nlpd", 0.25, 1.5, "img7"};
  const MetricRecord back = metric_record_from_jsonl(to_jsonl(r));
  EXPECT_EQ(back.metric, "nlpd");
  EXPECT_EQ(back.value, 0.25);
  EXPECT_EQ(back.bpp, 1.5);
  EXPECT_EQ(back.image_id, "img7");
  EXPECT_THROW(metric_record_from_jsonl("{"), FormatError);
}

}  // namespace
}  // namespace hdrc
