// core/include/teca/trainer.h

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

#ifndef TECA_TRAINER_H_
#define TECA_TRAINER_H_

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teca/manifest.h"
#include "teca/network.h"

namespace teca::train {

struct TrainConfig {
  double lr_init = 1e-4;
  double lr_decrement = 1e-5;  // subtracted on plateau
  double lr_floor = 1e-6;
  int plateau_patience = 3;  // epochs without validation improvement
  int batch_size = 16;       // frames per mini-batch
  int max_epochs = 100;
  uint64_t seed = 1234;
};

// Learning-rate plateau policy: after `patience` consecutive epochs
// without a new best validation loss, subtract `decrement` (never below
// `floor`) and restart the stall count.
struct PlateauSchedule {
  double lr;
  double decrement;
  double floor;
  int patience;
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;

  PlateauSchedule(double lr_init, double dec, double lr_floor, int pat)
      : lr(lr_init), decrement(dec), floor(lr_floor), patience(pat) {}

  // Feeds one epoch's validation loss; returns true when this epoch is a
  // new best.
  bool observe(double val_loss) {
    if (val_loss < best) {
      best = val_loss;
      stall = 0;
      return true;
    }
    if (++stall >= patience) {
      lr = std::max(lr - decrement, floor);
      stall = 0;
    }
    return false;
  }
};

// Bias-corrected Adam with (beta1, beta2, eps) = (0.9, 0.999, 1e-8).
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  void init(std::span<Param* const> params);
};

// One update over populated gradients. Throws NumericError on non-finite
// gradients before touching any parameter.
void adam_step(std::span<Param* const> params, AdamState* state, double lr);

// Compares every parameter's analytic gradient against central finite
// differences of the batch loss; returns the maximum relative error with
// denominator max(|analytic|, |numeric|, 1e-8). Intended for small models.
double gradcheck(net::Model* model, const net::Batch& batch, double h = 1e-5);

// In-memory frame dataset: normalized LPS features per utterance plus the
// per-utterance RT60 label replicated over frames.
class FrameDataset {
 public:
  // Loads every pair of the manifest. When `stats` is null the
  // normalization statistics are computed from this set's reverberant
  // features (the training-set convention) and also applied to targets.
  static FrameDataset load(const Manifest& manifest,
                           const dsp::StftConfig& stft, double power_floor,
                           int sample_rate,
                           const dsp::NormStats* stats = nullptr);

  const dsp::NormStats& stats() const { return stats_; }
  size_t num_utterances() const { return reverb_.size(); }
  size_t num_frames() const { return frames_.size(); }
  int f_count() const { return f_count_; }
  const std::vector<std::pair<int, int>>& frames() const { return frames_; }

  // Gathers a batch with clamped context offsets (edge frames replicate).
  net::Batch gather(std::span<const std::pair<int, int>> items,
                    int context) const;

 private:
  int f_count_ = 0;
  std::vector<Matrix> reverb_;  // normalized
  std::vector<Matrix> target_;  // normalized
  std::vector<double> labels_;  // rt60 per utterance, in label scale
  std::vector<std::pair<int, int>> frames_;
  dsp::NormStats stats_;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double derev_term = 0.0;  // validation decomposition
  double rt60_term = 0.0;
  double seconds = 0.0;
};

struct FitResult {
  net::Model model;  // parameters of the best validation epoch
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Minimizes the joint objective with frame-level mini-batches. The
// learning rate drops by lr_decrement (floored) after plateau_patience
// consecutive epochs without validation improvement. Deterministic for a
// fixed config.
FitResult fit(const Manifest& train_manifest, const Manifest& val_manifest,
              const TrainConfig& cfg, const net::ModelSpec& spec,
              const dsp::StftConfig& stft,
              double power_floor = dsp::kDefaultPowerFloor,
              int sample_rate = kDefaultSampleRate,
              const std::string& config_hash = "",
              const EpochCallback& on_epoch = nullptr);

void write_training_log(const std::string& path,
                        std::span<const EpochLog> log);

}  // namespace teca::train

#endif  // TECA_TRAINER_H_
