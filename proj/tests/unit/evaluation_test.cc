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

#include "hdrc/evaluation.h"

#include <gtest/gtest.h>

#include <sstream>

#include "hdrc/codec.h"
#include "hdrc/display_model.h"
#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/metrics.h"
#include "test_util.h"

namespace hdrc {
namespace {

using testing::random_hdr;
using testing::tiny_config;

TEST(EvaluateTest, SingleImageSingleModelMatchesDirectPipeline) {
  const Model model(tiny_config(), 1);
  const EvalImage im{"a", random_hdr(1, 16, 16), 1e5};
  const std::vector<RdRecord> records =
      evaluate({im}, {{&model, 50.0}}, default_eval_metrics());
  ASSERT_EQ(records.size(), 3u);

  const HdrImage ref = preprocess(im.image);
  const Bitstream b = compress(ref, model, 1e5);
  const DecodedImage d = decompress(b, model);
  const std::vector<double> e = choose_exposures(ref, 1e5, 4);
  for (const RdRecord& r : records) {
    EXPECT_EQ(r.image_id, "a");
    EXPECT_EQ(r.lambda_l, 50.0);
    EXPECT_EQ(r.bpp, bits_per_pixel(b));
    EXPECT_EQ(r.bpp_side, side_bits_per_pixel(b));
  }
  EXPECT_EQ(records[0].metric, "nlpd");
  EXPECT_EQ(records[0].value, nlpd(ref, 1e5, d.ldr));
  EXPECT_EQ(records[1].metric, "dstar_psnr");
  EXPECT_EQ(records[1].value,
            d_H_star(ref, d.hdr, 1e5, e, psnr_metric()).value);
  EXPECT_EQ(records[2].metric, "dstar_ssim");
  EXPECT_EQ(records[2].value,
            d_H_star(ref, d.hdr, 1e5, e, ssim_metric()).value);

  const auto curves = average_curves(records);
  ASSERT_EQ(curves.size(), 3u);
  EXPECT_EQ(curves.at("nlpd").points.size(), 1u);
  EXPECT_THROW(evaluate({im}, {{&model, 50.0}}, {"vdp"}), ParameterError);
}

TEST(AverageCurvesTest, PerLambdaMeansSortedByRate) {
  const std::vector<RdRecord> records = {
      {"a", 200, 0.8, 0.1, "nlpd", 0.10},
      {"b", 200, 1.0, 0.2, "nlpd", 0.20},
      {"a", 20, 0.2, 0.1, "nlpd", 0.40},
      {"b", 20, 0.4, 0.1, "nlpd", 0.60},
      {"a", 20, 0.2, 0.1, "dstar_psnr", 30.0}};
  const auto curves = average_curves(records);
  const RdCurve& n = curves.at("nlpd");
  ASSERT_EQ(n.points.size(), 2u);
  EXPECT_DOUBLE_EQ(n.points[0].bpp, 0.3);
  EXPECT_DOUBLE_EQ(n.points[0].quality, 0.5);
  EXPECT_DOUBLE_EQ(n.points[1].bpp, 0.9);
  EXPECT_DOUBLE_EQ(n.points[1].quality, 0.15);
  EXPECT_EQ(curves.at("dstar_psnr").points.size(), 1u);
}

TEST(RdCsvTest, RoundTripAndErrors) {
  const std::vector<RdRecord> records = {
      {"img 1", 20, 0.123456789012345, 0.01, "nlpd", 0.3},
      {"x", 200, 1.5, 0.25, "dstar_ssim", 3.75}};
  std::stringstream ss;
  write_rd_csv(ss, records);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
            "image_id,lambda_l,bpp,bpp_side,metric,value");
  const std::vector<RdRecord> back = read_rd_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].image_id, "img 1");
  EXPECT_EQ(back[0].bpp, 0.123456789012345);
  EXPECT_EQ(back[1].metric, "dstar_ssim");
  EXPECT_EQ(back[1].value, 3.75);

  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_rd_csv(bad_header), FormatError);
  std::istringstream bad_row(
      "image_id,lambda_l,bpp,bpp_side,metric,value\nx,1,zz,0,nlpd,1\n");
  EXPECT_THROW(read_rd_csv(bad_row), FormatError);
  std::istringstream short_row(
      "image_id,lambda_l,bpp,bpp_side,metric,value\nx,1,2\n");
  EXPECT_THROW(read_rd_csv(short_row), FormatError);
}

}  // namespace
}  // namespace hdrc
