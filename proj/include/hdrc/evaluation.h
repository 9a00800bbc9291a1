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

#ifndef HDRC_EVALUATION_H_
#define HDRC_EVALUATION_H_

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hdrc/bd_quality.h"
#include "hdrc/image.h"
#include "hdrc/model.h"

namespace hdrc {

struct EvalImage {
  std::string id;
  HdrImage image;
  double l_max = 1e5;
};

struct EvalModel {
  const Model* model = nullptr;
  double lambda_l = 0.0;
};

struct RdRecord {
  std::string image_id;
  double lambda_l = 0.0;
  double bpp = 0.0;
  double bpp_side = 0.0;
  std::string metric;
  double value = 0.0;
};

// Metric names: "nlpd", "dstar_psnr", "dstar_ssim".
std::vector<std::string> default_eval_metrics();

// Compresses and decodes every image with every model and scores the result.
std::vector<RdRecord> evaluate(const std::vector<EvalImage>& images,
                               const std::vector<EvalModel>& models,
                               const std::vector<std::string>& metrics,
                               int exposures = 4);

// Per metric, one point per lambda_l: mean bpp and mean value over images.
std::map<std::string, RdCurve> average_curves(
    const std::vector<RdRecord>& records);

// CSV with header image_id,lambda_l,bpp,bpp_side,metric,value.
void write_rd_csv(std::ostream& out, const std::vector<RdRecord>& records);
std::vector<RdRecord> read_rd_csv(std::istream& in);

}  // namespace hdrc

#endif  // HDRC_EVALUATION_H_
