// core/include/teca/network.h

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

#ifndef TECA_NETWORK_H_
#define TECA_NETWORK_H_

#include <optional>
#include <string>
#include <vector>

#include "teca/attention.h"
#include "teca/dsp.h"
#include "teca/matrix.h"
#include "teca/tape.h"
#include "teca/waveform.h"

namespace teca::net {

enum class ModelKind { kBaseline, kFta, kSta };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::kFta;
  int f_count = 257;
  int context = 9;   // c, odd
  int n_bands = 8;   // N, used by STA
  int d_q = 64;
  int d_v = 0;       // 0: default to the band width
  std::vector<int> derev_hidden = {2048, 2048, 2048};
  bool rt60_head = false;
  std::vector<int> head_hidden = {64, 64};

  int bands() const { return kind == ModelKind::kSta ? n_bands : 1; }
  void validate() const;
};

struct DenseLayer {
  Param w;  // out x in
  Param b;  // 1 x out
};

struct AttentionBand {
  Param wq, wk, wv;
};

// A full checkpointable model: attention projections, dereverberation
// net, optional RT60 head, plus the feature-space description needed to
// run it standalone (STFT config and normalization statistics).
struct Model {
  ModelSpec spec;
  dsp::StftConfig stft;
  double power_floor = dsp::kDefaultPowerFloor;
  int sample_rate = kDefaultSampleRate;
  attn::SubbandPartition partition;
  std::vector<AttentionBand> bands;  // empty for baseline
  std::vector<DenseLayer> derev;
  std::vector<DenseLayer> head;  // empty unless spec.rt60_head
  dsp::NormStats stats;
  std::string config_hash;

  // Width of the feature row entering the dereverberation net.
  int derev_input_width() const;
  int head_input_width() const { return spec.bands() * spec.context; }
  // All learnable arrays in declaration (= serialization) order.
  std::vector<Param*> parameters();
  std::vector<const Param*> parameters() const;
  size_t parameter_count() const;
  void zero_grads();
};

Model init_model(const ModelSpec& spec, const dsp::StftConfig& stft,
                 double power_floor, int sample_rate, uint64_t seed);

// One training/inference batch in normalized feature space.
struct Batch {
  Matrix center;            // B x F reverberant frames
  std::vector<Matrix> ctx;  // c slices, B x F each
  Matrix target;            // B x F anechoic frames (empty at inference)
  Matrix z;                 // B x 1 RT60 labels (empty at inference)
};

struct ForwardGraph {
  Tape::Id xhat = -1;        // B x F dereverberated estimate
  Tape::Id weights = -1;     // B x (N*c) attention rows; -1 for baseline
  Tape::Id zhat = -1;        // B x 1 RT60 estimate; -1 without the head
  Tape::Id loss = -1;        // scalar; -1 when the batch has no targets
  Tape::Id derev_term = -1;
  Tape::Id rt60_term = -1;
};

// Builds the forward graph for a batch. With `train` set, model
// parameters enter as leaves so backward() accumulates their gradients;
// otherwise they are constants.
ForwardGraph build_forward(Tape* tape, Model* model, const Batch& batch,
                           bool train);

// Eq-style joint objective on plain matrices:
// (1/(T*F)) ||X - Xhat||^2 + (1/T) ||Z - Zhat||^2.
double derev_loss_term(const Matrix& x, const Matrix& xhat);
double rt60_loss_term(const Matrix& z, const Matrix& zhat);
double joint_loss(const Matrix& x, const Matrix& xhat, const Matrix& z,
                  const Matrix& zhat);

// Per-frame feedforward stacks exposed for direct use: features -> X_hat
// (normalized domain) and attention rows -> Z_hat in (0, 1).
Matrix derev_forward(const Model& model, const Matrix& features);
Matrix rt60_forward(const Model& model, const Matrix& attention_rows);

struct Prediction {
  Waveform enhanced;
  // Filled only when RT60 diagnostics are requested and the model has
  // the estimation head.
  std::optional<double> rt60_estimate;
  std::vector<double> rt60_frames;
};

// Full pipeline: stft -> lps -> normalize -> context -> attention ->
// dereverb net -> denormalize -> reconstruct with the reverberant phase.
// Output length equals input length.
Prediction predict_utterance(const Model& model, const Waveform& y,
                             bool with_rt60 = false);

// Attention rows for a whole utterance (analysis path). Throws for
// baseline models ("no attention weights").
Matrix utterance_attention_weights(const Model& model, const Waveform& y);

// Versioned binary checkpoint ("TECA" magic, metadata JSON, raw little-
// endian float64 parameter blocks in declaration order).
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace teca::net

#endif  // TECA_NETWORK_H_
