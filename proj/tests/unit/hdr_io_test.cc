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

#include "hdrc/hdr_io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hdrc/errors.h"
#include "hdrc/random.h"

namespace hdrc {
namespace {

std::vector<std::uint8_t> header_bytes(int h, int w) {
  const std::string s = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                        std::to_string(h) + " +X " + std::to_string(w) + "\n";
  return {s.begin(), s.end()};
}

// Reference decoder for flat or new-style RLE scanlines.
std::vector<double> oracle_decode(const std::vector<std::uint8_t>& file, int h,
                                  int w) {
  std::size_t pos = 0;
  int newlines = 0;
  while (newlines < 2 || file[pos - 1] != '\n' || file[pos - 2] != '\n') {
    if (file[pos++] == '\n') ++newlines;
  }
  while (file[pos++] != '\n') {
  }
  std::vector<double> out;
  std::vector<std::uint8_t> line(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < h; ++y) {
    if (w >= 8 && w < 32768 && file[pos] == 2 && file[pos + 1] == 2) {
      pos += 4;
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < w) {
          int n = file[pos++];
          if (n > 128) {
            n -= 128;
            const std::uint8_t v = file[pos++];
            for (int i = 0; i < n; ++i) line[(x++) * 4 + c] = v;
          } else {
            for (int i = 0; i < n; ++i) line[(x++) * 4 + c] = file[pos++];
          }
        }
      }
    } else {
      for (int i = 0; i < w * 4; ++i) line[i] = file[pos++];
    }
    for (int x = 0; x < w; ++x) {
      const int e = line[x * 4 + 3];
      for (int c = 0; c < 3; ++c) {
        out.push_back(
            e == 0 ? 0.0
                   : std::ldexp(static_cast<double>(line[x * 4 + c]), e - 136));
      }
    }
  }
  return out;
}

HdrImage random_image(std::uint64_t seed, int h, int w) {
  Rng rng(seed);
  Image im(h, w);
  for (double& v : im.data()) v = std::exp(rng.uniform(-8.0, 8.0));
  return {im, std::nullopt, std::nullopt};
}

TEST(RgbeTest, ZeroExponentDecodesToZero) {
  const std::uint8_t px[4] = {0, 0, 0, 0};
  double r, g, b;
  rgbe_to_float(px, &r, &g, &b);
  EXPECT_EQ(r, 0.0);
  EXPECT_EQ(g, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(RgbeTest, MidMantissaDecodesToOne) {
  const std::uint8_t px[4] = {128, 128, 128, 129};
  double r, g, b;
  rgbe_to_float(px, &r, &g, &b);
  EXPECT_EQ(r, 1.0);
  EXPECT_EQ(g, 1.0);
  EXPECT_EQ(b, 1.0);
}

TEST(RgbeTest, FlatFileMatchesReferenceDecoder) {
  const int h = 3;
  const int w = 5;
  std::vector<std::uint8_t> file = header_bytes(h, w);
  Rng rng(7);
  for (int i = 0; i < h * w; ++i) {
    for (int c = 0; c < 4; ++c)
      file.push_back(static_cast<std::uint8_t>(rng.uniform_index(256)));
  }
  const HdrImage im = read_radiance_hdr(file);
  const std::vector<double> want = oracle_decode(file, h, w);
  ASSERT_EQ(im.pixels.data().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    EXPECT_EQ(im.pixels.data()[i], want[i]);
}

TEST(RgbeTest, WrittenRleFileMatchesReferenceDecoder) {
  const HdrImage src = random_image(3, 6, 40);
  const std::vector<std::uint8_t> file = write_radiance_hdr(src);
  const HdrImage back = read_radiance_hdr(file);
  const std::vector<double> want = oracle_decode(file, 6, 40);
  for (std::size_t i = 0; i < want.size(); ++i)
    EXPECT_EQ(back.pixels.data()[i], want[i]);
}

TEST(RgbeTest, RoundTripWithinSharedExponentPrecision) {
  for (int w : {1, 7, 8, 33}) {
    const HdrImage src = random_image(w, 4, w);
    const HdrImage back = read_radiance_hdr(write_radiance_hdr(src));
    ASSERT_EQ(back.pixels.height(), 4);
    ASSERT_EQ(back.pixels.width(), w);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < w; ++x) {
        double m = 0.0;
        for (int c = 0; c < 3; ++c) m = std::max(m, src.pixels.at(y, x, c));
        for (int c = 0; c < 3; ++c) {
          EXPECT_LE(std::abs(back.pixels.at(y, x, c) - src.pixels.at(y, x, c)),
                    m / 128.0);
        }
      }
    }
  }
}

TEST(RgbeTest, ZeroAndConstantImages) {
  const HdrImage zero{Image(3, 9, 0.0), std::nullopt, std::nullopt};
  const HdrImage zero_back = read_radiance_hdr(write_radiance_hdr(zero));
  for (double v : zero_back.pixels.data()) EXPECT_EQ(v, 0.0);
  const HdrImage ones{Image(2, 10, 1.0), std::nullopt, std::nullopt};
  const HdrImage ones_back = read_radiance_hdr(write_radiance_hdr(ones));
  for (double v : ones_back.pixels.data()) {
    EXPECT_NEAR(v, 1.0, 1.0 / 128.0);
  }
  const HdrImage single{Image(1, 1, 0.25), std::nullopt, std::nullopt};
  const HdrImage back = read_radiance_hdr(write_radiance_hdr(single));
  EXPECT_EQ(back.pixels.height(), 1);
  EXPECT_NEAR(back.pixels.at(0, 0, 1), 0.25, 0.25 / 128.0);
}

TEST(RgbeTest, MalformedHeaderIsFormatError) {
  const std::string bad = "P6\n1 1\n255\n";
  EXPECT_THROW(
      read_radiance_hdr(std::vector<std::uint8_t>(bad.begin(), bad.end())),
      FormatError);
}

TEST(RgbeTest, TruncatedScanlineIsCorruptionError) {
  std::vector<std::uint8_t> file = write_radiance_hdr(random_image(1, 4, 20));
  file.resize(file.size() - 5);
  EXPECT_THROW(read_radiance_hdr(file), CorruptionError);
}

TEST(RgbeTest, NonFinitePixelsAreRejected) {
  HdrImage im{Image(1, 2, 1.0), std::nullopt, std::nullopt};
  im.pixels.at(0, 1, 0) = std::nan("");
  EXPECT_THROW(write_radiance_hdr(im), ParameterError);
}

TEST(LuminanceTest, Rec709Weights) {
  Image im(1, 3);
  for (int c = 0; c < 3; ++c) im.at(0, 0, c) = 1.0;
  im.at(0, 1, 0) = 1.0;
  im.at(0, 2, 0) = 2.0;
  im.at(0, 2, 1) = 4.0;
  const Plane l = luminance(im);
  EXPECT_NEAR(l.at(0, 0), 1.0, 1e-15);
  EXPECT_EQ(l.at(0, 1), 0.2126);
  EXPECT_NEAR(l.at(0, 2), 2 * 0.2126 + 4 * 0.7152, 1e-15);
}

TEST(PreprocessTest, ScalesMaximumLuminanceToOne) {
  HdrImage im{Image(2, 2, 0.5), std::nullopt, std::nullopt};
  for (int c = 0; c < 3; ++c) im.pixels.at(1, 1, c) = 2.0;
  im.calib_max_luminance = 1000.0;
  const HdrImage p = preprocess(im);
  EXPECT_EQ(*p.scale_applied, 0.5);
  EXPECT_FALSE(p.calib_max_luminance.has_value());
  double m = 0.0;
  for (double v : luminance(p).data) m = std::max(m, v);
  EXPECT_NEAR(m, 1.0, 1e-6);
}

TEST(PreprocessTest, UnitMaximumIsIdentityAndIdempotent) {
  const HdrImage p = preprocess(random_image(11, 5, 6));
  const HdrImage q = preprocess(p);
  EXPECT_NEAR(*q.scale_applied, 1.0, 1e-12);
  EXPECT_EQ(preprocess(q).pixels.data(), q.pixels.data());
  HdrImage ones{Image(2, 3, 1.0), std::nullopt, std::nullopt};
  const HdrImage o = preprocess(ones);
  EXPECT_EQ(*o.scale_applied, 1.0);
  EXPECT_EQ(o.pixels.data(), ones.pixels.data());
}

TEST(PreprocessTest, AllZeroIsDegenerate) {
  EXPECT_THROW(
      preprocess(HdrImage{Image(2, 2, 0.0), std::nullopt, std::nullopt}),
      DegenerateInputError);
}

TEST(PerspectiveTest, PrincipalRayHitsPanoramaCenter) {
  const HdrImage pano = random_image(5, 32, 64);
  const HdrImage view =
      equirect_to_perspective(pano, 0.0, 0.0, 3.14159265358979 / 4, 33);
  for (int c = 0; c < 3; ++c) {
    const double lo =
        std::min({pano.pixels.at(15, 31, c), pano.pixels.at(15, 32, c),
                  pano.pixels.at(16, 31, c), pano.pixels.at(16, 32, c)});
    const double hi =
        std::max({pano.pixels.at(15, 31, c), pano.pixels.at(15, 32, c),
                  pano.pixels.at(16, 31, c), pano.pixels.at(16, 32, c)});
    EXPECT_GE(view.pixels.at(16, 16, c), lo - 1e-12);
    EXPECT_LE(view.pixels.at(16, 16, c), hi + 1e-12);
  }
}

TEST(PerspectiveTest, ConstantPanoramaGivesConstantView) {
  const HdrImage pano{Image(16, 32, 3.5), std::nullopt, std::nullopt};
  const HdrImage view = equirect_to_perspective(pano, 1.0, -0.4, 1.2, 20);
  EXPECT_EQ(view.pixels.height(), 20);
  EXPECT_EQ(view.pixels.width(), 20);
  for (double v : view.pixels.data()) EXPECT_NEAR(v, 3.5, 1e-12);
}

TEST(PerspectiveTest, OutputStaysInsidePanoramaRange) {
  const HdrImage pano = random_image(9, 24, 48);
  double lo = 1e300;
  double hi = -1e300;
  for (double v : pano.pixels.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double yaw : {-3.0, 0.5, 3.1}) {
    const HdrImage view = equirect_to_perspective(pano, yaw, 1.2, 1.5, 17);
    for (double v : view.pixels.data()) {
      EXPECT_GE(v, lo);
      EXPECT_LE(v, hi);
    }
  }
}

TEST(PerspectiveTest, NonEquirectangularIsShapeError) {
  const HdrImage pano{Image(16, 16, 1.0), std::nullopt, std::nullopt};
  EXPECT_THROW(equirect_to_perspective(pano, 0, 0, 1.0, 8), ShapeError);
}

}  // namespace
}  // namespace hdrc
