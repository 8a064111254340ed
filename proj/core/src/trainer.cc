// core/src/trainer.cc

// Copyright 2026 The teca authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teca/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "teca/errors.h"
#include "teca/rng.h"
#include "teca/wav_io.h"

namespace teca::train {

void AdamState::init(std::span<Param* const> params) {
  step = 0;
  m.clear();
  v.clear();
  for (const Param* p : params) {
    m.emplace_back(p->value.rows(), p->value.cols());
    v.emplace_back(p->value.rows(), p->value.cols());
  }
}

void adam_step(std::span<Param* const> params, AdamState* state, double lr) {
  TECA_CHECK(state->m.size() == params.size(),
             "Adam state does not match the parameter list");
  for (const Param* p : params) {
    if (!p->grad.all_finite()) {
      throw NumericError("non-finite gradient in parameter " + p->name);
    }
  }
  state->step += 1;
  const double bc1 = 1.0 - std::pow(state->beta1, state->step);
  const double bc2 = 1.0 - std::pow(state->beta2, state->step);
  for (size_t i = 0; i < params.size(); ++i) {
    Param* p = params[i];
    double* m = state->m[i].data();
    double* v = state->v[i].data();
    double* w = p->value.data();
    const double* g = p->grad.data();
    const size_t n = p->value.size();
    for (size_t k = 0; k < n; ++k) {
      m[k] = state->beta1 * m[k] + (1.0 - state->beta1) * g[k];
      v[k] = state->beta2 * v[k] + (1.0 - state->beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      w[k] -= lr * mhat / (std::sqrt(vhat) + state->eps);
    }
  }
}

double gradcheck(net::Model* model, const net::Batch& batch, double h) {
  TECA_CHECK(batch.target.size() > 0, "gradcheck needs a batch with targets");

  const auto loss_value = [&]() {
    Tape tape;
    net::ForwardGraph g = net::build_forward(&tape, model, batch,
                                             /*train=*/false);
    return tape.value(g.loss)(0, 0);
  };

  model->zero_grads();
  {
    Tape tape;
    net::ForwardGraph g = net::build_forward(&tape, model, batch,
                                             /*train=*/true);
    tape.backward(g.loss);
  }

  double max_rel = 0.0;
  for (Param* p : model->parameters()) {
    double* w = p->value.data();
    const double* g = p->grad.data();
    for (size_t k = 0; k < p->value.size(); ++k) {
      const double saved = w[k];
      w[k] = saved + h;
      const double up = loss_value();
      w[k] = saved - h;
      const double down = loss_value();
      w[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom =
          std::max({std::abs(g[k]), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(g[k] - numeric) / denom);
    }
  }
  return max_rel;
}

FrameDataset FrameDataset::load(const Manifest& manifest,
                                const dsp::StftConfig& stft,
                                double power_floor, int sample_rate,
                                const dsp::NormStats* stats) {
  TECA_CHECK(!manifest.records.empty(), "empty manifest");
  FrameDataset ds;
  ds.f_count_ = stft.bins();

  std::vector<Matrix> raw_reverb, raw_target;
  raw_reverb.reserve(manifest.records.size());
  raw_target.reserve(manifest.records.size());
  for (const PairRecord& r : manifest.records) {
    const Waveform y = read_wav_checked(r.reverb_path, sample_rate);
    const Waveform x = read_wav_checked(r.anechoic_path, sample_rate);
    raw_reverb.push_back(dsp::lps(dsp::stft(y, stft), power_floor));
    raw_target.push_back(dsp::lps(dsp::stft(x, stft), power_floor));
    TECA_CHECK(raw_reverb.back().rows() == raw_target.back().rows(),
               "pair " << r.id << ": frame counts differ");
    ds.labels_.push_back(r.rt60);  // label scale: RT60 / 1.0 s
  }

  // Reverberant-input statistics, shared with the anechoic targets so
  // both live on one scale.
  ds.stats_ = stats ? *stats
                    : dsp::compute_norm_stats(
                          std::span<const Matrix>(raw_reverb));

  for (size_t u = 0; u < raw_reverb.size(); ++u) {
    ds.reverb_.push_back(dsp::normalize(raw_reverb[u], ds.stats_));
    ds.target_.push_back(dsp::normalize(raw_target[u], ds.stats_));
    for (int t = 0; t < ds.reverb_.back().rows(); ++t) {
      ds.frames_.emplace_back(static_cast<int>(u), t);
    }
  }
  return ds;
}

net::Batch FrameDataset::gather(
    std::span<const std::pair<int, int>> items, int context) const {
  const int b_count = static_cast<int>(items.size());
  const int half = (context - 1) / 2;
  net::Batch batch;
  batch.center = Matrix(b_count, f_count_);
  batch.target = Matrix(b_count, f_count_);
  batch.z = Matrix(b_count, 1);
  batch.ctx.assign(context, Matrix(b_count, f_count_));

  for (int i = 0; i < b_count; ++i) {
    const auto [u, t] = items[i];
    const Matrix& rev = reverb_[u];
    const double* src = rev.row(t);
    std::copy(src, src + f_count_, batch.center.row(i));
    const double* tgt = target_[u].row(t);
    std::copy(tgt, tgt + f_count_, batch.target.row(i));
    batch.z(i, 0) = labels_[u];
    for (int k = 0; k < context; ++k) {
      const int tt = std::clamp(t + k - half, 0, rev.rows() - 1);
      const double* s = rev.row(tt);
      std::copy(s, s + f_count_, batch.ctx[k].row(i));
    }
  }
  return batch;
}

namespace {

struct LossAccumulator {
  double derev_sse = 0.0;  // sum over frames x bins
  double rt60_sse = 0.0;   // sum over frames
  size_t frames = 0;
  int f_count = 1;

  void add_batch(double derev_term, double rt60_term, int batch_frames) {
    derev_sse += derev_term * batch_frames * f_count;
    rt60_sse += rt60_term * batch_frames;
    frames += batch_frames;
  }
  double derev() const {
    return derev_sse / (static_cast<double>(frames) * f_count);
  }
  double rt60() const { return rt60_sse / static_cast<double>(frames); }
  double total() const { return derev() + rt60(); }
};

}  // namespace

FitResult fit(const Manifest& train_manifest, const Manifest& val_manifest,
              const TrainConfig& cfg, const net::ModelSpec& spec,
              const dsp::StftConfig& stft, double power_floor,
              int sample_rate, const std::string& config_hash,
              const EpochCallback& on_epoch) {
  TECA_CHECK(cfg.batch_size >= 1 && cfg.max_epochs >= 1 &&
                 cfg.plateau_patience >= 1,
             "bad training configuration");
  TECA_CHECK(cfg.lr_init > 0 && cfg.lr_floor > 0 &&
                 cfg.lr_floor <= cfg.lr_init,
             "bad learning-rate configuration");

  const FrameDataset train_ds =
      FrameDataset::load(train_manifest, stft, power_floor, sample_rate);
  const FrameDataset val_ds = FrameDataset::load(
      val_manifest, stft, power_floor, sample_rate, &train_ds.stats());

  net::Model model =
      net::init_model(spec, stft, power_floor, sample_rate, cfg.seed);
  model.stats = train_ds.stats();
  model.config_hash = config_hash;

  std::vector<Param*> params = model.parameters();
  AdamState adam;
  adam.init(params);

  const int c = spec.context;
  const auto eval_set = [&](const FrameDataset& ds, LossAccumulator* acc) {
    acc->f_count = ds.f_count();
    const auto& frames = ds.frames();
    for (size_t at = 0; at < frames.size(); at += cfg.batch_size) {
      const size_t n = std::min<size_t>(cfg.batch_size, frames.size() - at);
      const net::Batch batch =
          ds.gather(std::span(frames.data() + at, n), c);
      Tape tape;
      net::ForwardGraph g =
          net::build_forward(&tape, &model, batch, /*train=*/false);
      const double derev = tape.value(g.derev_term)(0, 0);
      const double rt60 =
          g.rt60_term >= 0 ? tape.value(g.rt60_term)(0, 0) : 0.0;
      acc->add_batch(derev, rt60, static_cast<int>(n));
    }
  };

  FitResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  PlateauSchedule schedule(cfg.lr_init, cfg.lr_decrement, cfg.lr_floor,
                           cfg.plateau_patience);

  std::vector<std::pair<int, int>> order = train_ds.frames();

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng(Rng::derive(cfg.seed, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(&order);

    LossAccumulator train_acc;
    train_acc.f_count = train_ds.f_count();
    for (size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const size_t n = std::min<size_t>(cfg.batch_size, order.size() - at);
      const net::Batch batch =
          train_ds.gather(std::span(order.data() + at, n), c);
      Tape tape;
      net::ForwardGraph g =
          net::build_forward(&tape, &model, batch, /*train=*/true);
      const double loss = tape.value(g.loss)(0, 0);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " +
                           std::to_string(epoch) + ", frame offset " +
                           std::to_string(at));
      }
      const double derev = tape.value(g.derev_term)(0, 0);
      const double rt60 =
          g.rt60_term >= 0 ? tape.value(g.rt60_term)(0, 0) : 0.0;
      train_acc.add_batch(derev, rt60, static_cast<int>(n));

      model.zero_grads();
      tape.backward(g.loss);
      adam_step(params, &adam, schedule.lr);
    }

    LossAccumulator val_acc;
    eval_set(val_ds, &val_acc);

    EpochLog entry;
    entry.epoch = epoch;
    entry.lr = schedule.lr;
    entry.train_loss = train_acc.total();
    entry.val_loss = val_acc.total();
    entry.derev_term = val_acc.derev();
    entry.rt60_term = val_acc.rt60();
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (schedule.observe(entry.val_loss)) {
      result.best_val_loss = entry.val_loss;
      result.best_epoch = epoch;
      result.model = model;  // snapshot of the best parameters
    }
  }

  TECA_CHECK(result.best_epoch > 0, "training produced no checkpoint");
  return result;
}

void write_training_log(const std::string& path,
                        std::span<const EpochLog> log) {
  std::ofstream out(path, std::ios::trunc);
  TECA_CHECK(out.good(), "cannot open training log for writing: " << path);
  for (const EpochLog& e : log) {
    nlohmann::json j = {
        {"epoch", e.epoch},         {"lr", e.lr},
        {"train_loss", e.train_loss}, {"val_loss", e.val_loss},
        {"derev_term", e.derev_term}, {"rt60_term", e.rt60_term},
        {"seconds", e.seconds}};
    out << j.dump() << "\n";
  }
}

}  // namespace teca::train
