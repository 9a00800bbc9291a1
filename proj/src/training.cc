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

#include "hdrc/training.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hdrc/errors.h"
#include "hdrc/hdr_io.h"
#include "hdrc/ops.h"

namespace hdrc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent streams for epoch-level and step-level draws.
Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed ^ splitmix64(tag)) + index));
}

constexpr std::uint64_t kEpochTag = 1;
constexpr std::uint64_t kStepTag = 2;

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

HdrImage crop_image(const HdrImage& s, int top, int left, int size) {
  HdrImage out;
  out.pixels = Image(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c)
        out.pixels.at(y, x, c) = s.pixels.at(top + y, left + x, c);
    }
  }
  return out;
}

bool grads_finite(const ParamStore& params) {
  for (const NamedParam& p : params.entries()) {
    if (p.var.has_grad() && !p.var.grad().all_finite()) return false;
  }
  return true;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda_l > 0) || !(lambda_h > 0))
    throw ParameterError("lambdas must be positive");
  if (!(lr > 0)) throw ParameterError("learning rate must be positive");
  if (!(lr_decay_factor > 0) || lr_decay_every < 1) {
    throw ParameterError("invalid learning-rate schedule");
  }
  if (epochs < 1 || steps < 0) throw ParameterError("invalid training length");
  if (batch < 1 || crop < 1)
    throw ParameterError("batch and crop must be positive");
  if (l_max_set.empty()) throw ParameterError("L_max set must not be empty");
  for (double l : l_max_set) {
    if (!(l > 0)) throw ParameterError("L_max values must be positive");
  }
  if (exposures < 1) throw ParameterError("need at least one exposure");
  network.validate();
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"lambda_l", cfg.lambda_l},
          {"lambda_h", cfg.lambda_h},
          {"lr", cfg.lr},
          {"lr_decay_factor", cfg.lr_decay_factor},
          {"lr_decay_every", cfg.lr_decay_every},
          {"epochs", cfg.epochs},
          {"steps", cfg.steps},
          {"batch", cfg.batch},
          {"crop", cfg.crop},
          {"l_max_set", cfg.l_max_set},
          {"seed", cfg.seed},
          {"exposures", cfg.exposures},
          {"checkpoint_every", cfg.checkpoint_every},
          {"checkpoint_path", cfg.checkpoint_path},
          {"network", to_json(cfg.network)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw FormatError("training config must be a JSON object");
  TrainConfig c;
  if (j.value("preset", std::string()) == "desk") c = desk_train_config();
  try {
    c.lambda_l = j.value("lambda_l", c.lambda_l);
    c.lambda_h = j.value("lambda_h", c.lambda_h);
    c.lr = j.value("lr", c.lr);
    c.lr_decay_factor = j.value("lr_decay_factor", c.lr_decay_factor);
    c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
    c.epochs = j.value("epochs", c.epochs);
    c.steps = j.value("steps", c.steps);
    c.batch = j.value("batch", c.batch);
    c.crop = j.value("crop", c.crop);
    c.l_max_set = j.value("l_max_set", c.l_max_set);
    c.seed = j.value("seed", c.seed);
    c.exposures = j.value("exposures", c.exposures);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.checkpoint_path = j.value("checkpoint_path", c.checkpoint_path);
    if (j.contains("network")) {
      c.network = network_config_from_json(j.at("network"), c.network);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad training config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig desk_train_config() {
  TrainConfig c;
  c.network.base_channels = 16;
  c.network.ldr_latent_channels = 16;
  c.network.hdr_latent_channels = 8;
  c.network.num_down_stages = 3;
  c.network.embed_dim = 16;
  c.lr = 2e-3;
  c.batch = 4;
  c.crop = 64;
  c.steps = 200;
  return c;
}

double scheduled_lr(const TrainConfig& cfg, int epoch) {
  if (epoch < 1) throw ParameterError("epochs are 1-based");
  const int phase = (epoch - 1) / cfg.lr_decay_every;
  return cfg.lr / std::pow(cfg.lr_decay_factor, phase);
}

TrainBatch make_batch(const std::vector<HdrImage>& items,
                      std::vector<double> l_max, int exposures) {
  if (items.empty() || items.size() != l_max.size()) {
    throw ParameterError("batch needs one L_max per item");
  }
  const int h = items[0].pixels.height();
  const int w = items[0].pixels.width();
  const int n = static_cast<int>(items.size());
  TrainBatch b;
  b.images = Tensor(Shape{n, 3, h, w});
  b.exposure_ratios.assign(exposures, std::vector<double>(n, 1.0));
  for (int i = 0; i < n; ++i) {
    const Image& im = items[i].pixels;
    if (im.height() != h || im.width() != w)
      throw ShapeError("batch items differ in size");
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) b.images.at(i, c, y, x) = im.at(y, x, c);
      }
    }
    try {
      const std::vector<double> e =
          choose_exposures(items[i], l_max[i], exposures);
      for (int k = 0; k < exposures; ++k)
        b.exposure_ratios[k][i] = l_max[i] / e[k];
    } catch (const DegenerateInputError&) {
      // All-dark item: keep unit ratios.
    }
  }
  b.l_max = std::move(l_max);
  return b;
}

LossTerms rd_loss(const Model& model, const TrainBatch& batch,
                  const TrainConfig& cfg, Rng& noise) {
  const Transforms& t = model.transforms();
  const Shape& s = batch.images.shape();
  const int n = s.n;
  const double pixels = static_cast<double>(n) * s.h * s.w;
  const ag::Var x = ag::constant(batch.images);
  const ag::Var xp = pad_to_alignment(x, model.config().alignment());

  const LdrRate ldr = model.ldr_entropy().forward(t.ldr_analysis(xp), &noise);
  const HdrRate hdr = model.hdr_entropy().forward(t.hdr_analysis(xp), &noise);
  ag::Var i_hat = t.ldr_synthesis(ldr.y_hat, t.embedder(batch.l_max));
  if (i_hat.shape().h != s.h || i_hat.shape().w != s.w) {
    i_hat = ag::crop(i_hat, 0, 0, s.h, s.w);
  }
  const ag::Var s_hat = t.reconstruction(i_hat, t.hdr_synthesis(hdr.y_hat));

  // d_L: NLPD between the calibrated reference and the displayed LDR output.
  Tensor ref(Shape{n, 1, s.h, s.w});
  for (int b = 0; b < n; ++b) {
    for (int y = 0; y < s.h; ++y) {
      for (int xx = 0; xx < s.w; ++xx) {
        const double lum = kLumaR * batch.images.at(b, 0, y, xx) +
                           kLumaG * batch.images.at(b, 1, y, xx) +
                           kLumaB * batch.images.at(b, 2, y, xx);
        ref.at(b, 0, y, xx) = std::max(lum * batch.l_max[b], kNlpdMinLuminance);
      }
    }
  }
  const ag::Var d_l = nlpd(ag::constant(std::move(ref)), display_render(i_hat));

  // d_H: sum over the exposure stack of (1 - SSIM), with matched exposures.
  ag::Var d_h = ag::scalar(0.0);
  for (const std::vector<double>& ratios : batch.exposure_ratios) {
    const ag::Var r = ag::constant(Tensor(Shape{n, 1, 1, 1}, ratios));
    const ag::Var q = ssim(expose(x, r), expose(s_hat, r));
    d_h = ag::add(d_h, ag::add_scalar(ag::neg(q), 1.0));
  }

  const ag::Var r_l =
      ag::mul_scalar(ag::add(ldr.bits_y, ldr.bits_z), 1.0 / pixels);
  const ag::Var r_h = ag::mul_scalar(hdr.bits_y, 1.0 / pixels);
  LossTerms out;
  out.loss = ag::add(ag::add(r_h, ag::mul_scalar(d_h, cfg.lambda_h)),
                     ag::add(r_l, ag::mul_scalar(d_l, cfg.lambda_l)));
  out.r_l = r_l.item();
  out.r_h = r_h.item();
  out.d_l = d_l.item();
  out.d_h = d_h.item();
  return out;
}

Adam::Adam(const ParamStore& params) {
  for (const NamedParam& p : params.entries()) {
    params_.push_back(p.var);
    state_.m.emplace_back(p.var.shape());
    state_.v.emplace_back(p.var.shape());
  }
}

Adam::Adam(const ParamStore& params, AdamState state)
    : state_(std::move(state)) {
  for (const NamedParam& p : params.entries()) params_.push_back(p.var);
  if (state_.m.size() != params_.size() || state_.v.size() != params_.size()) {
    throw ModelError("optimizer state does not match the model");
  }
}

void Adam::step(double lr) {
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(kBeta1, t);
  const double c2 = 1.0 - std::pow(kBeta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) continue;
    Tensor& p = params_[i].mutable_value();
    const Tensor& g = params_[i].grad();
    Tensor& m = state_.m[i];
    Tensor& v = state_.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEpsilon);
    }
  }
}

std::string to_jsonl(const TrainLogRecord& r) {
  const nlohmann::json j = {
      {"step", r.step}, {"epoch", r.epoch}, {"loss", r.loss}, {"r_l", r.r_l},
      {"r_h", r.r_h},   {"d_l", r.d_l},     {"d_h", r.d_h},   {"lr", r.lr}};
  return j.dump();
}

std::vector<HdrImage> prepare_dataset(std::vector<HdrImage> images) {
  if (images.empty()) throw ParameterError("training needs at least one image");
  for (HdrImage& im : images) im = preprocess(im);
  return images;
}

Trainer::Trainer(const TrainConfig& cfg, std::vector<HdrImage> dataset)
    : Trainer(cfg, std::move(dataset),
              std::make_unique<Model>(cfg.network, cfg.seed), nullptr) {}

Trainer::Trainer(const TrainConfig& cfg, std::vector<HdrImage> dataset,
                 std::unique_ptr<Model> model, std::unique_ptr<Adam> adam)
    : cfg_(cfg),
      dataset_(std::move(dataset)),
      model_(std::move(model)),
      adam_(std::move(adam)) {
  cfg_.validate();
  if (dataset_.empty())
    throw ParameterError("training needs at least one image");
  crop_ = cfg_.crop;
  for (const HdrImage& im : dataset_) {
    crop_ = std::min({crop_, im.pixels.height(), im.pixels.width()});
  }
  if (crop_ < 1) throw ShapeError("training images must be non-empty");
  if (!adam_) adam_ = std::make_unique<Adam>(model_->params());
}

Trainer Trainer::resume(const std::string& checkpoint_path,
                        std::vector<HdrImage> dataset) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint_path);
  if (!ck.metadata.contains("train") || !ck.adam) {
    throw ModelError("checkpoint carries no training state");
  }
  TrainConfig cfg = train_config_from_json(ck.metadata.at("train"));
  cfg.network = ck.model->config();
  auto adam = std::make_unique<Adam>(ck.model->params(), std::move(*ck.adam));
  return Trainer(cfg, std::move(dataset), std::move(ck.model), std::move(adam));
}

int Trainer::steps_per_epoch() const {
  return static_cast<int>((dataset_.size() + cfg_.batch - 1) / cfg_.batch);
}

std::int64_t Trainer::total_steps() const {
  if (cfg_.steps > 0) return cfg_.steps;
  return static_cast<std::int64_t>(cfg_.epochs) * steps_per_epoch();
}

std::vector<double> Trainer::l_max_for_epoch(int epoch) const {
  // Balanced draws: every value of the set appears once per |set| items.
  Rng rng =
      stream(cfg_.seed, kEpochTag, 2 * static_cast<std::uint64_t>(epoch) + 1);
  const std::size_t k = cfg_.l_max_set.size();
  std::vector<double> out;
  std::vector<std::size_t> order(k);
  while (out.size() < dataset_.size()) {
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    shuffle(order, rng);
    for (std::size_t i = 0; i < k && out.size() < dataset_.size(); ++i) {
      out.push_back(cfg_.l_max_set[order[i]]);
    }
  }
  return out;
}

TrainBatch Trainer::batch_for_step(std::int64_t step) const {
  const int spe = steps_per_epoch();
  const int epoch = static_cast<int>(step / spe);
  const int index = static_cast<int>(step % spe);
  Rng order_rng =
      stream(cfg_.seed, kEpochTag, 2 * static_cast<std::uint64_t>(epoch));
  std::vector<std::size_t> order(dataset_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, order_rng);
  const std::vector<double> l_max = l_max_for_epoch(epoch);

  Rng crop_rng =
      stream(cfg_.seed, kStepTag, 2 * static_cast<std::uint64_t>(step));
  std::vector<HdrImage> items;
  std::vector<double> lm;
  const std::size_t begin = static_cast<std::size_t>(index) * cfg_.batch;
  const std::size_t end = std::min(dataset_.size(), begin + cfg_.batch);
  for (std::size_t i = begin; i < end; ++i) {
    const HdrImage& src = dataset_[order[i]];
    const int top = static_cast<int>(
        crop_rng.uniform_index(src.pixels.height() - crop_ + 1));
    const int left = static_cast<int>(
        crop_rng.uniform_index(src.pixels.width() - crop_ + 1));
    HdrImage c = crop_image(src, top, left, crop_);
    try {
      c = preprocess(c);
    } catch (const DegenerateInputError&) {
      // An all-dark crop stays as is.
    }
    items.push_back(std::move(c));
    lm.push_back(l_max[i]);
  }
  return make_batch(items, std::move(lm), cfg_.exposures);
}

TrainLogRecord Trainer::step() {
  const std::int64_t s = steps_done();
  const int epoch = static_cast<int>(s / steps_per_epoch()) + 1;
  const TrainBatch batch = batch_for_step(s);
  Rng noise =
      stream(cfg_.seed, kStepTag, 2 * static_cast<std::uint64_t>(s) + 1);
  model_->params().zero_grad();
  const LossTerms terms = rd_loss(*model_, batch, cfg_, noise);
  const double loss = terms.loss.item();
  bool finite = std::isfinite(loss);
  if (finite) {
    terms.loss.backward();
    finite = grads_finite(model_->params());
  }
  if (!finite) {
    if (!cfg_.checkpoint_path.empty()) save(cfg_.checkpoint_path);
    std::ostringstream msg;
    msg << "non-finite loss or gradient at step " << s + 1 << " (loss=" << loss
        << " r_l=" << terms.r_l << " r_h=" << terms.r_h << " d_l=" << terms.d_l
        << " d_h=" << terms.d_h << ")";
    throw TrainingFault(msg.str());
  }
  const double lr = scheduled_lr(cfg_, epoch);
  adam_->step(lr);
  TrainLogRecord r;
  r.step = s + 1;
  r.epoch = epoch;
  r.loss = loss;
  r.r_l = terms.r_l;
  r.r_h = terms.r_h;
  r.d_l = terms.d_l;
  r.d_h = terms.d_h;
  r.lr = lr;
  return r;
}

void Trainer::run(std::ostream* log) {
  while (steps_done() < total_steps()) {
    const TrainLogRecord r = step();
    if (log != nullptr) *log << to_jsonl(r) << '\n' << std::flush;
    if (cfg_.checkpoint_every > 0 && !cfg_.checkpoint_path.empty() &&
        r.step % cfg_.checkpoint_every == 0) {
      save(cfg_.checkpoint_path);
    }
  }
  if (!cfg_.checkpoint_path.empty()) save(cfg_.checkpoint_path);
}

void Trainer::save(const std::string& path) const {
  const nlohmann::json meta = {{"train", to_json(cfg_)},
                               {"step", steps_done()}};
  save_checkpoint(path, *model_, meta, &adam_->state());
}

}  // namespace hdrc
