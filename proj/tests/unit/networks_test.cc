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

#include "hdrc/networks.h"

#include <gtest/gtest.h>

#include <cmath>

#include "hdrc/errors.h"
#include "hdrc/model.h"
#include "hdrc/ops.h"
#include "test_util.h"

namespace hdrc {
namespace {

using testing::mean_abs_diff;
using testing::random_hdr;
using testing::random_ldr;
using testing::tiny_config;

TEST(NetworkConfigTest, DefaultsAndValidation) {
  const NetworkConfig c;
  EXPECT_EQ(c.base_channels, 48);
  EXPECT_EQ(c.ldr_latent_channels, 64);
  EXPECT_EQ(c.hdr_latent_channels, 32);
  EXPECT_EQ(c.num_down_stages, 4);
  EXPECT_EQ(c.embed_dim, 128);
  EXPECT_TRUE(c.attention);
  NetworkConfig bad = c;
  bad.embed_dim = 7;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = c;
  bad.num_down_stages = 0;
  EXPECT_THROW(bad.validate(), ParameterError);
  EXPECT_EQ(network_config_from_json(to_json(tiny_config())), tiny_config());
}

TEST(EmbeddingTest, SinusoidalFeaturesMatchFormula) {
  const int d = 8;
  const std::vector<double> f = sinusoidal_features(1e5, d);
  ASSERT_EQ(f.size(), 8u);
  for (int i = 0; i < 4; ++i) {
    const double omega = std::pow(10.0, -4.0 * i / 3.0);
    EXPECT_NEAR(f[i], std::sin(5.0 * omega), 1e-12);
    EXPECT_NEAR(f[4 + i], std::cos(5.0 * omega), 1e-12);
  }
  EXPECT_THROW(sinusoidal_features(0.0, d), ParameterError);
  EXPECT_THROW(sinusoidal_features(-1.0, d), ParameterError);
}

TEST(EmbeddingTest, DeterministicAndDistinctOnConditioningSet) {
  const Model m(tiny_config(), 1);
  const LuminanceEmbedding a = luminance_embedding(m.transforms(), 1e4);
  const LuminanceEmbedding b = luminance_embedding(m.transforms(), 1e4);
  const LuminanceEmbedding c = luminance_embedding(m.transforms(), 1e7);
  ASSERT_EQ(a.vector.size(), 8u);
  EXPECT_EQ(a.vector, b.vector);
  double dist = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i)
    dist += std::abs(a.vector[i] - c.vector[i]);
  EXPECT_GT(dist, 0.0);
}

TEST(PaddingTest, PaddedSizeRoundsUp) {
  const PaddedSize p = padded_size(65, 64, 16);
  EXPECT_EQ(p.height, 80);
  EXPECT_EQ(p.width, 64);
  EXPECT_EQ(p.pad_h, 15);
  EXPECT_EQ(p.pad_w, 0);
  const PaddedSize q = padded_size(1, 1, 16);
  EXPECT_EQ(q.height, 16);
  EXPECT_EQ(q.pad_w, 15);
}

TEST(AnalysisTest, LatentShapes) {
  NetworkConfig c = tiny_config();
  c.num_down_stages = 4;
  c.ldr_latent_channels = 64;
  c.hdr_latent_channels = 32;
  const Model m(c, 2);
  const LatentTensor y = analysis_ldr(m.transforms(), random_hdr(1, 64, 64));
  EXPECT_EQ(y.values.shape(), (Shape{1, 64, 4, 4}));
  EXPECT_FALSE(y.quantized);
  const LatentTensor y65 = analysis_ldr(m.transforms(), random_hdr(2, 65, 65));
  EXPECT_EQ(y65.values.shape(), (Shape{1, 64, 5, 5}));
  const LatentTensor yh = analysis_hdr(m.transforms(), random_hdr(1, 64, 64));
  EXPECT_EQ(yh.values.shape(), (Shape{1, 32, 4, 4}));
}

TEST(AnalysisTest, DeterministicAndInputSensitive) {
  const Model m(tiny_config(), 3);
  const HdrImage s = random_hdr(4, 16, 16);
  const LatentTensor a = analysis_hdr(m.transforms(), s);
  const LatentTensor b = analysis_hdr(m.transforms(), s);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    EXPECT_EQ(a.values[i], b.values[i]);
  // Finite-difference probe of one input pixel.
  HdrImage s2 = s;
  s2.pixels.at(5, 5, 1) += 1e-3;
  const LatentTensor c = analysis_hdr(m.transforms(), s2);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    diff += std::abs(a.values[i] - c.values[i]);
  EXPECT_GT(diff, 0.0);
}

TEST(AnalysisTest, EmptyImageIsRejected) {
  const Model m(tiny_config(), 3);
  EXPECT_THROW(analysis_ldr(m.transforms(), HdrImage{}), ShapeError);
}

TEST(SynthesisTest, ShapeRoundTripForAnySize) {
  const Model m(tiny_config(), 5);
  for (auto [h, w] : {std::pair{1, 1}, {3, 7}, {16, 16}, {17, 5}, {30, 33}}) {
    const HdrImage s = random_hdr(h * 100 + w, h, w);
    const LatentTensor y = analysis_ldr(m.transforms(), s);
    const LdrImage out = synthesis_ldr(m.transforms(), y, 1e5, h, w);
    EXPECT_EQ(out.pixels.height(), h);
    EXPECT_EQ(out.pixels.width(), w);
    const FeatureMaps f =
        synthesis_hdr(m.transforms(), analysis_hdr(m.transforms(), s));
    const HdrImage r = reconstruct(m.transforms(), out, f);
    EXPECT_EQ(r.pixels.height(), h);
    EXPECT_EQ(r.pixels.width(), w);
  }
}

TEST(SynthesisTest, OutputInUnitRangeForExtremeLatents) {
  const Model m(tiny_config(), 6);
  for (double v : {-1e3, 1e3}) {
    LatentTensor y{Tensor(Shape{1, 8, 2, 2}, std::vector<double>(32, v)), true};
    const LdrImage out = synthesis_ldr(m.transforms(), y, 1e5, 8, 8);
    for (double p : out.pixels.data()) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(SynthesisTest, ConditioningChangesOutput) {
  const Model m(tiny_config(), 7);
  const LatentTensor y = analysis_ldr(m.transforms(), random_hdr(8, 16, 16));
  const LdrImage a = synthesis_ldr(m.transforms(), y, 1e4, 16, 16);
  const LdrImage b = synthesis_ldr(m.transforms(), y, 1e7, 16, 16);
  EXPECT_GT(mean_abs_diff(a.pixels, b.pixels), 0.0);
}

TEST(SynthesisTest, ChannelMismatchIsShapeError) {
  const Model m(tiny_config(), 7);
  LatentTensor y{Tensor(Shape{1, 5, 2, 2}), true};
  EXPECT_THROW(synthesis_ldr(m.transforms(), y, 1e5, 8, 8), ShapeError);
  EXPECT_THROW(synthesis_hdr(m.transforms(), y), ShapeError);
}

TEST(HdrSynthesisTest, ThreeScalesAtQuarterHalfFull) {
  NetworkConfig c = tiny_config();
  c.num_down_stages = 4;
  c.base_channels = 12;
  const Model m(c, 9);
  const FeatureMaps f = synthesis_hdr(
      m.transforms(), analysis_hdr(m.transforms(), random_hdr(3, 64, 64)));
  ASSERT_EQ(f.scales.size(), 3u);
  EXPECT_EQ(f.scales[0].shape(), (Shape{1, 12, 16, 16}));
  EXPECT_EQ(f.scales[1].shape(), (Shape{1, 6, 32, 32}));
  EXPECT_EQ(f.scales[2].shape(), (Shape{1, 3, 64, 64}));
  EXPECT_EQ(HdrSynthesis::channel_counts(10), (std::vector<int>{10, 5, 3}));
}

TEST(ReconstructionTest, NonNegativeAndUsesSideInformation) {
  const Model m(tiny_config(), 10);
  const HdrImage s = random_hdr(11, 16, 16);
  const FeatureMaps f =
      synthesis_hdr(m.transforms(), analysis_hdr(m.transforms(), s));
  const LdrImage ldr = random_ldr(12, 16, 16);
  const HdrImage r = reconstruct(m.transforms(), ldr, f);
  for (double v : r.pixels.data()) EXPECT_GE(v, 0.0);
  FeatureMaps zero;
  for (const ag::Var& v : f.scales)
    zero.scales.push_back(ag::constant(Tensor(v.shape())));
  const HdrImage r0 = reconstruct(m.transforms(), ldr, zero);
  EXPECT_GT(mean_abs_diff(r.pixels, r0.pixels), 0.0);
  const HdrImage again = reconstruct(m.transforms(), ldr, f);
  EXPECT_EQ(again.pixels.data(), r.pixels.data());
}

TEST(ReconstructionTest, MisalignedFeaturesAreShapeError) {
  const Model m(tiny_config(), 10);
  const FeatureMaps f = synthesis_hdr(
      m.transforms(), analysis_hdr(m.transforms(), random_hdr(1, 8, 8)));
  EXPECT_THROW(reconstruct(m.transforms(), random_ldr(1, 16, 16), f),
               ShapeError);
  FeatureMaps two{{f.scales[0], f.scales[1]}};
  EXPECT_THROW(reconstruct(m.transforms(), random_ldr(1, 8, 8), two),
               ShapeError);
}

TEST(ModelTest, SeedDeterminesParametersAndId) {
  const Model a(tiny_config(), 1);
  const Model b(tiny_config(), 1);
  const Model c(tiny_config(), 2);
  EXPECT_EQ(a.model_id(), b.model_id());
  EXPECT_NE(a.model_id(), c.model_id());
}

TEST(ModelTest, FnvMatchesPublishedVectors) {
  const std::string s = "foobar";
  const std::vector<std::uint8_t> bytes(s.begin(), s.end());
  EXPECT_EQ(fnv1a32(bytes), 0xbf9cf968u);
  EXPECT_EQ(fnv1a64(bytes), 0x85944171f73967e8ull);
  EXPECT_EQ(fnv1a32({}), 0x811c9dc5u);
}

}  // namespace
}  // namespace hdrc
