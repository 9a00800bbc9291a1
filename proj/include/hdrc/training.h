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

#ifndef HDRC_TRAINING_H_
#define HDRC_TRAINING_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "hdrc/checkpoint.h"
#include "hdrc/display_model.h"
#include "hdrc/image.h"
#include "hdrc/metrics.h"
#include "hdrc/model.h"
#include "hdrc/random.h"
#include "json.hpp"

namespace hdrc {

struct TrainConfig {
  double lambda_l = 100.0;
  double lambda_h = 1500.0;
  double lr = 1e-4;
  double lr_decay_factor = 10.0;
  int lr_decay_every = 200;  // epochs
  int epochs = 600;
  // When positive, training stops after this many steps instead of `epochs`.
  std::int64_t steps = 0;
  int batch = 8;
  int crop = 64;
  std::vector<double> l_max_set = {1e4, 1e5, 1e6, 1e7};
  std::uint64_t seed = 0;
  int exposures = 4;         // K of the HDR distortion
  int checkpoint_every = 0;  // steps; 0 disables periodic checkpoints
  std::string checkpoint_path;
  NetworkConfig network;

  void validate() const;
};

// Small network and step-based settings that train in minutes on one core.
TrainConfig desk_train_config();

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Learning rate in effect during `epoch` (1-based).
double scheduled_lr(const TrainConfig& cfg, int epoch);

struct TrainBatch {
  Tensor images;  // [N, 3, H, W], each item pre-processed
  std::vector<double> l_max;
  // ratios[k][n] = l_max / e^(k) for item n.
  std::vector<std::vector<double>> exposure_ratios;
};

// Builds exposure ratios from each item's reference percentiles.
TrainBatch make_batch(const std::vector<HdrImage>& items,
                      std::vector<double> l_max, int exposures);

struct LossTerms {
  ag::Var loss;
  // Rates in bits per pixel; distortions as used in the loss.
  double r_l = 0.0;
  double r_h = 0.0;
  double d_l = 0.0;
  double d_h = 0.0;
};

// r_H + lambda_H d_H + r_L + lambda_L d_L with noise-proxied latents drawn
// from `noise`.
LossTerms rd_loss(const Model& model, const TrainBatch& batch,
                  const TrainConfig& cfg, Rng& noise);

class Adam {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit Adam(const ParamStore& params);
  Adam(const ParamStore& params, AdamState state);
  // Applies one update from the gradients currently held by the parameters.
  void step(double lr);
  const AdamState& state() const { return state_; }

 private:
  std::vector<ag::Var> params_;
  AdamState state_;
};

struct TrainLogRecord {
  std::int64_t step = 0;
  int epoch = 0;
  double loss = 0.0;
  double r_l = 0.0;
  double r_h = 0.0;
  double d_l = 0.0;
  double d_h = 0.0;
  double lr = 0.0;
};
std::string to_jsonl(const TrainLogRecord& r);

// Deterministic trainer: data order, crops, conditioning luminances and noise
// are all derived from (seed, epoch, step). A resumed run continues the same
// trajectory.
class Trainer {
 public:
  Trainer(const TrainConfig& cfg, std::vector<HdrImage> dataset);
  // Continues from a checkpoint written by save(); the config is taken from it.
  static Trainer resume(const std::string& checkpoint_path,
                        std::vector<HdrImage> dataset);

  // One optimization step. Throws TrainingFault on a non-finite loss or
  // gradient, after saving the last good state when a checkpoint path is set.
  TrainLogRecord step();
  // Steps until total_steps() is reached, writing JSONL records to `log`.
  void run(std::ostream* log = nullptr);
  std::int64_t total_steps() const;

  void save(const std::string& path) const;
  const Model& model() const { return *model_; }
  Model& model() { return *model_; }
  const TrainConfig& config() const { return cfg_; }
  std::int64_t steps_done() const { return adam_->state().step; }
  int steps_per_epoch() const;
  // The batch for a given 0-based step (exposed for tests).
  TrainBatch batch_for_step(std::int64_t step) const;
  std::vector<double> l_max_for_epoch(int epoch) const;

 private:
  Trainer(const TrainConfig& cfg, std::vector<HdrImage> dataset,
          std::unique_ptr<Model> model, std::unique_ptr<Adam> adam);

  TrainConfig cfg_;
  std::vector<HdrImage> dataset_;
  int crop_ = 0;
  std::unique_ptr<Model> model_;
  std::unique_ptr<Adam> adam_;
};

// Pre-processed training set from a list of HDR images.
std::vector<HdrImage> prepare_dataset(std::vector<HdrImage> images);

}  // namespace hdrc

#endif  // HDRC_TRAINING_H_
