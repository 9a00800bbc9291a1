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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hdrc/bd_quality.h"
#include "hdrc/checkpoint.h"
#include "hdrc/codec.h"
#include "hdrc/dataset.h"
#include "hdrc/errors.h"
#include "hdrc/evaluation.h"
#include "hdrc/hdr_io.h"
#include "hdrc/training.h"
#include "json.hpp"

namespace hdrc {
namespace {

constexpr double kDefaultLmax = 1e5;
constexpr double kDegreesToRadians = 3.14159265358979323846 / 180.0;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::unique_ptr<Model> load_model(const std::string& path) {
  return load_checkpoint(path).model;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<HdrImage> read_dataset(const std::string& path) {
  if (std::filesystem::is_directory(path)) return read_hdr_directory(path);
  return {read_radiance_hdr_file(path)};
}

std::vector<std::string> dataset_ids(const std::string& path) {
  std::vector<std::string> ids;
  if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.path().extension() == ".hdr")
        ids.push_back(e.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
  } else {
    ids.push_back(std::filesystem::path(path).stem().string());
  }
  return ids;
}

std::vector<RdRecord> read_rd_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_rd_csv(in);
}

RdCurve select_curve(const std::map<std::string, RdCurve>& curves,
                     const std::string& metric, const std::string& file) {
  auto it = curves.find(metric);
  if (it == curves.end())
    throw FormatError(file + " has no records for " + metric);
  return it->second;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app("Learned HDR image compression with a display-ready LDR layer",
               "hdrc");
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::string model_path;
  std::optional<double> lmax;
  std::uint64_t seed = 0;

  CLI::App* compress_cmd =
      app.add_subcommand("compress", "Encode an RGBE image");
  compress_cmd->add_option("input", in_path, "Radiance .hdr file")->required();
  compress_cmd->add_option("--model", model_path, "Checkpoint")->required();
  compress_cmd->add_option("--lmax", lmax, "Maximum scene luminance (cd/m^2)");
  compress_cmd->add_option("--out", out_path, "Output bitstream")->required();

  bool automated = false;
  CLI::App* decompress_cmd =
      app.add_subcommand("decompress", "Decode a bitstream");
  decompress_cmd->add_option("input", in_path, "Bitstream")->required();
  decompress_cmd->add_option("--model", model_path, "Checkpoint")->required();
  decompress_cmd->add_option("--lmax", lmax, "Override the header luminance");
  decompress_cmd->add_flag("--auto", automated,
                           "Fuse a pseudo-multi-exposure stack for display");
  decompress_cmd->add_option("--out", out_path, "Output prefix (.hdr and .ppm)")
      ->required();

  std::string config_path;
  std::string data_path;
  std::string resume_path;
  std::string log_path;
  std::optional<double> lambda_l;
  std::optional<std::int64_t> steps;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", data_path, ".hdr file or directory")
      ->required();
  train_cmd->add_option("--config", config_path, "JSON training config");
  train_cmd->add_option("--lambda-l", lambda_l, "LDR distortion weight");
  train_cmd->add_option("--seed", seed, "Random seed");
  train_cmd->add_option("--steps", steps, "Number of steps");
  train_cmd->add_option("--resume", resume_path, "Continue from a checkpoint");
  train_cmd->add_option("--log", log_path, "JSONL log file (default stdout)");
  train_cmd->add_option("--out", out_path, "Output checkpoint")->required();

  std::vector<std::string> model_paths;
  std::vector<double> lambdas;
  std::string metrics_list = "nlpd,dstar_psnr,dstar_ssim";
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Rate-distortion evaluation");
  eval_cmd->add_option("--data", data_path, ".hdr file or directory")
      ->required();
  eval_cmd->add_option("--model", model_paths, "Checkpoints")->required();
  eval_cmd->add_option("--lambda-l", lambdas, "One lambda_l per model");
  eval_cmd->add_option("--lmax", lmax,
                       "Scene luminance for uncalibrated images");
  eval_cmd->add_option("--metrics", metrics_list, "Comma-separated metrics");
  eval_cmd->add_option("--out", out_path, "RD records (CSV; default stdout)");

  std::string test_path;
  std::string anchor_path;
  std::string bd_metrics;
  CLI::App* bd_cmd = app.add_subcommand("bd", "BD-quality of two RD files");
  bd_cmd->add_option("test", test_path, "Test RD records")->required();
  bd_cmd->add_option("anchor", anchor_path, "Anchor RD records")->required();
  bd_cmd->add_option("--metrics", bd_metrics, "Comma-separated metrics");

  CLI::App* dataset_cmd = app.add_subcommand("dataset", "Dataset tools");
  dataset_cmd->require_subcommand(1);
  std::string manifest_path;
  int synthetic = 0;
  int size = 64;
  double fov_deg = 90.0;
  CLI::App* gen_cmd =
      dataset_cmd->add_subcommand("gen", "Generate training crops");
  auto* manifest_opt = gen_cmd->add_option("--manifest", manifest_path,
                                           "Panorama crop manifest");
  auto* synthetic_opt = gen_cmd->add_option("--synthetic", synthetic,
                                            "Number of procedural scenes");
  manifest_opt->excludes(synthetic_opt);
  gen_cmd->add_option("--size", size, "Crop side length")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--fov", fov_deg, "Field of view in degrees")
      ->check(CLI::Range(1.0, 179.0));
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--out", out_path, "Output directory")->required();

  CLI::App* init_cmd =
      app.add_subcommand("init", "Write an untrained checkpoint");
  init_cmd->add_option("--config", config_path, "JSON training config");
  init_cmd->add_option("--seed", seed, "Random seed");
  init_cmd->add_option("--out", out_path, "Output checkpoint")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compress_cmd) {
      const std::unique_ptr<Model> model = load_model(model_path);
      const HdrImage s = read_radiance_hdr_file(in_path);
      const double l =
          lmax.value_or(s.calib_max_luminance.value_or(kDefaultLmax));
      const Bitstream b = compress(s, *model, l);
      write_file_bytes(out_path, serialize_bitstream(b));
      out << "wrote " << out_path << ": " << b.total_bytes() << " bytes, "
          << bits_per_pixel(b) << " bpp (side " << side_bits_per_pixel(b)
          << ")\n";
    } else if (*decompress_cmd) {
      const std::unique_ptr<Model> model = load_model(model_path);
      const Bitstream b = parse_bitstream(read_file_bytes(in_path));
      if (automated) {
        if (lmax) throw UsageError("--lmax and --auto are exclusive");
        const AutoDecoded d = automated_decode(b, *model);
        for (std::size_t k = 0; k < d.stack.size(); ++k) {
          write_ppm_file(out_path + ".stack" + std::to_string(k) + ".ppm",
                         d.stack[k]);
        }
        write_ppm_file(out_path + ".ppm", d.fused);
        write_radiance_hdr_file(out_path + ".hdr", d.hdr);
      } else {
        const DecodedImage d = decompress(b, *model, lmax);
        write_ppm_file(out_path + ".ppm", d.ldr);
        write_radiance_hdr_file(out_path + ".hdr", d.hdr);
      }
      out << "wrote " << out_path << ".ppm and " << out_path << ".hdr\n";
    } else if (*train_cmd) {
      std::vector<HdrImage> data = prepare_dataset(read_dataset(data_path));
      std::ofstream log_file;
      std::ostream* log = &out;
      if (!log_path.empty()) {
        log_file.open(log_path);
        if (!log_file) throw FormatError("cannot open " + log_path);
        log = &log_file;
      }
      if (!resume_path.empty()) {
        Trainer t = Trainer::resume(resume_path, std::move(data));
        t.run(log);
        t.save(out_path);
      } else {
        TrainConfig cfg =
            config_path.empty()
                ? desk_train_config()
                : train_config_from_json(read_json_file(config_path));
        if (lambda_l) cfg.lambda_l = *lambda_l;
        if (train_cmd->count("--seed") > 0) cfg.seed = seed;
        if (steps) cfg.steps = *steps;
        cfg.checkpoint_path = out_path;
        cfg.validate();
        Trainer t(cfg, std::move(data));
        t.run(log);
      }
    } else if (*eval_cmd) {
      const std::vector<HdrImage> images = read_dataset(data_path);
      const std::vector<std::string> ids = dataset_ids(data_path);
      if (!lambdas.empty() && lambdas.size() != model_paths.size()) {
        throw UsageError("give one --lambda-l per --model");
      }
      std::vector<EvalImage> eval_images;
      for (std::size_t i = 0; i < images.size(); ++i) {
        const double l =
            lmax.value_or(images[i].calib_max_luminance.value_or(kDefaultLmax));
        eval_images.push_back({ids[i], images[i], l});
      }
      std::vector<std::unique_ptr<Model>> owned;
      std::vector<EvalModel> models;
      for (std::size_t i = 0; i < model_paths.size(); ++i) {
        LoadedCheckpoint ck = load_checkpoint(model_paths[i]);
        double lam = 0.0;
        if (!lambdas.empty()) {
          lam = lambdas[i];
        } else if (ck.metadata.contains("train")) {
          lam = train_config_from_json(ck.metadata.at("train")).lambda_l;
        }
        owned.push_back(std::move(ck.model));
        models.push_back({owned.back().get(), lam});
      }
      const std::vector<RdRecord> records =
          evaluate(eval_images, models, split_list(metrics_list));
      if (out_path.empty()) {
        write_rd_csv(out, records);
      } else {
        std::ofstream f(out_path);
        if (!f) throw FormatError("cannot open " + out_path);
        write_rd_csv(f, records);
      }
    } else if (*bd_cmd) {
      const auto test = average_curves(read_rd_file(test_path));
      const auto anchor = average_curves(read_rd_file(anchor_path));
      std::vector<std::string> metrics = split_list(bd_metrics);
      if (metrics.empty()) {
        for (const auto& [name, curve] : test) {
          if (anchor.count(name) > 0) metrics.push_back(name);
        }
      }
      if (metrics.empty()) throw FormatError("the RD files share no metric");
      out << std::fixed << std::setprecision(6);
      for (const std::string& m : metrics) {
        const double v = bd_quality(select_curve(test, m, test_path),
                                    select_curve(anchor, m, anchor_path));
        const double shown = std::abs(v) < 5e-7 ? 0.0 : v;
        if (metrics.size() == 1) {
          out << shown << '\n';
        } else {
          out << m << ' ' << shown << '\n';
        }
      }
    } else if (*dataset_cmd) {
      std::vector<HdrImage> crops;
      if (!manifest_path.empty()) {
        crops = crops_from_manifest(manifest_path,
                                    {fov_deg * kDegreesToRadians, size});
      } else if (synthetic > 0) {
        for (int i = 0; i < synthetic; ++i) {
          crops.push_back(synthetic_scene(seed * 1000003ULL + i, size, size));
        }
      } else {
        throw UsageError("dataset gen needs --manifest or --synthetic N");
      }
      write_hdr_directory(out_path, crops);
      out << "wrote " << crops.size() << " images to " << out_path << '\n';
    } else if (*init_cmd) {
      const TrainConfig cfg =
          config_path.empty()
              ? desk_train_config()
              : train_config_from_json(read_json_file(config_path));
      const Model model(cfg.network, seed);
      save_checkpoint(out_path, model, {{"train", to_json(cfg)}});
      out << "wrote " << out_path << '\n';
    }
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const TrainingFault& e) {
    err << "training fault: " << e.what() << '\n';
    return kExitModel;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace hdrc
