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

#include <iomanip>
#include <sstream>

#include "hdrc/codec.h"
#include "hdrc/display_model.h"
#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/metrics.h"

namespace hdrc {
namespace {

constexpr const char* kCsvHeader =
    "image_id,lambda_l,bpp,bpp_side,metric,value";

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad number '" + s + "'");
  }
}

}  // namespace

std::vector<std::string> default_eval_metrics() {
  return {"nlpd", "dstar_psnr", "dstar_ssim"};
}

std::vector<RdRecord> evaluate(const std::vector<EvalImage>& images,
                               const std::vector<EvalModel>& models,
                               const std::vector<std::string>& metrics,
                               int exposures) {
  if (models.empty())
    throw ParameterError("evaluation needs at least one model");
  for (const std::string& m : metrics) {
    if (m != "nlpd" && m != "dstar_psnr" && m != "dstar_ssim") {
      throw ParameterError("unknown metric " + m);
    }
  }
  std::vector<RdRecord> out;
  for (const EvalModel& em : models) {
    for (const EvalImage& im : images) {
      const HdrImage ref = preprocess(im.image);
      const Bitstream b = compress(ref, *em.model, im.l_max);
      const DecodedImage d = decompress(b, *em.model);
      RdRecord base{
          im.id, em.lambda_l, bits_per_pixel(b), side_bits_per_pixel(b),
          "",    0.0};
      std::vector<double> e;
      for (const std::string& m : metrics) {
        RdRecord r = base;
        r.metric = m;
        if (m == "nlpd") {
          r.value = nlpd(ref, im.l_max, d.ldr);
        } else {
          if (e.empty()) e = choose_exposures(ref, im.l_max, exposures);
          const BaseMetric bm =
              m == "dstar_psnr" ? psnr_metric() : ssim_metric();
          r.value = d_H_star(ref, d.hdr, im.l_max, e, bm).value;
        }
        out.push_back(r);
      }
    }
  }
  return out;
}

std::map<std::string, RdCurve> average_curves(
    const std::vector<RdRecord>& records) {
  struct Acc {
    double bpp = 0.0;
    double value = 0.0;
    int n = 0;
  };
  std::map<std::string, std::map<double, Acc>> acc;
  for (const RdRecord& r : records) {
    Acc& a = acc[r.metric][r.lambda_l];
    a.bpp += r.bpp;
    a.value += r.value;
    ++a.n;
  }
  std::map<std::string, RdCurve> out;
  for (const auto& [metric, by_lambda] : acc) {
    RdCurve& c = out[metric];
    for (const auto& [lambda, a] : by_lambda) {
      c.points.push_back({a.bpp / a.n, a.value / a.n, metric, ""});
    }
    std::sort(c.points.begin(), c.points.end(),
              [](const RdPoint& x, const RdPoint& y) { return x.bpp < y.bpp; });
  }
  return out;
}

void write_rd_csv(std::ostream& out, const std::vector<RdRecord>& records) {
  out << kCsvHeader << '\n';
  out << std::setprecision(17);
  for (const RdRecord& r : records) {
    out << r.image_id << ',' << r.lambda_l << ',' << r.bpp << ',' << r.bpp_side
        << ',' << r.metric << ',' << r.value << '\n';
  }
}

std::vector<RdRecord> read_rd_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw FormatError("RD file must start with '" + std::string(kCsvHeader) +
                      "'");
  }
  std::vector<RdRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw FormatError("RD line needs 6 fields: " + line);
    out.push_back({f[0], parse_double(f[1]), parse_double(f[2]),
                   parse_double(f[3]), f[4], parse_double(f[5])});
  }
  return out;
}

}  // namespace hdrc
