// core/src/network.cc

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

#include "teca/network.h"

#include <cmath>

#include "teca/errors.h"
#include "teca/rng.h"

namespace teca::net {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBaseline: return "baseline";
    case ModelKind::kFta: return "fta";
    case ModelKind::kSta: return "sta";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "baseline") return ModelKind::kBaseline;
  if (s == "fta") return ModelKind::kFta;
  if (s == "sta") return ModelKind::kSta;
  throw UsageError("unknown model kind: " + s +
                   " (expected baseline|fta|sta)");
}

void ModelSpec::validate() const {
  TECA_CHECK(f_count >= 1, "f_count must be >= 1");
  TECA_CHECK(context >= 1 && context % 2 == 1, "context size must be odd");
  TECA_CHECK(d_q >= 1, "d_q must be >= 1");
  TECA_CHECK(d_v >= 0, "d_v must be >= 0");
  if (kind == ModelKind::kSta) {
    TECA_CHECK(n_bands >= 1 && n_bands <= f_count, "bad subband count");
  }
  if (rt60_head) {
    TECA_CHECK(kind != ModelKind::kBaseline,
               "the RT60 head needs attention weights; baseline has none");
  }
  for (int w : derev_hidden) TECA_CHECK(w >= 1, "bad hidden width");
  for (int w : head_hidden) TECA_CHECK(w >= 1, "bad head width");
}

int Model::derev_input_width() const {
  if (spec.kind == ModelKind::kBaseline) return spec.f_count * spec.context;
  int total = 0;
  for (int b = 0; b < partition.n_bands; ++b) {
    const int dv = spec.d_v > 0 ? spec.d_v : partition.band_width(b);
    total += dv * spec.context;
  }
  return total;
}

std::vector<Param*> Model::parameters() {
  std::vector<Param*> out;
  for (AttentionBand& b : bands) {
    out.push_back(&b.wq);
    out.push_back(&b.wk);
    out.push_back(&b.wv);
  }
  for (DenseLayer& l : derev) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  for (DenseLayer& l : head) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Param*> Model::parameters() const {
  std::vector<const Param*> out;
  for (Param* p : const_cast<Model*>(this)->parameters()) out.push_back(p);
  return out;
}

size_t Model::parameter_count() const {
  size_t n = 0;
  for (const Param* p : parameters()) n += p->value.size();
  return n;
}

void Model::zero_grads() {
  for (Param* p : parameters()) p->zero_grad();
}

namespace {

Matrix xavier(int rows, int cols, Rng* rng) {
  Matrix m(rows, cols);
  const double bound = std::sqrt(6.0 / (rows + cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng->uniform(-bound, bound);
  }
  return m;
}

DenseLayer make_layer(const std::string& name, int in, int out, Rng* rng) {
  DenseLayer l;
  l.w = Param(name + ".w", xavier(out, in, rng));
  l.b = Param(name + ".b", Matrix(1, out));
  return l;
}

}  // namespace

Model init_model(const ModelSpec& spec, const dsp::StftConfig& stft,
                 double power_floor, int sample_rate, uint64_t seed) {
  spec.validate();
  stft.validate();
  Model m;
  m.spec = spec;
  m.stft = stft;
  m.power_floor = power_floor;
  m.sample_rate = sample_rate;

  Rng rng(seed);
  if (spec.kind == ModelKind::kBaseline) {
    m.partition = attn::partition_bands(spec.f_count, 1);
  } else {
    m.partition = attn::partition_bands(spec.f_count, spec.bands());
    for (int b = 0; b < m.partition.n_bands; ++b) {
      const int width = m.partition.band_width(b);
      const int dv = spec.d_v > 0 ? spec.d_v : width;
      const std::string name = "band" + std::to_string(b);
      AttentionBand band;
      band.wq = Param(name + ".wq", xavier(spec.d_q, width, &rng));
      band.wk = Param(name + ".wk", xavier(spec.d_q, width, &rng));
      band.wv = Param(name + ".wv", xavier(dv, width, &rng));
      m.bands.push_back(std::move(band));
    }
  }

  int in = m.derev_input_width();
  int layer_idx = 0;
  for (int width : spec.derev_hidden) {
    m.derev.push_back(
        make_layer("derev" + std::to_string(layer_idx++), in, width, &rng));
    in = width;
  }
  m.derev.push_back(
      make_layer("derev" + std::to_string(layer_idx), in, spec.f_count, &rng));

  if (spec.rt60_head) {
    in = m.head_input_width();
    layer_idx = 0;
    for (int width : spec.head_hidden) {
      m.head.push_back(
          make_layer("head" + std::to_string(layer_idx++), in, width, &rng));
      in = width;
    }
    m.head.push_back(make_layer("head" + std::to_string(layer_idx), in, 1,
                                &rng));
  }
  return m;
}

namespace {

Tape::Id param_node(Tape* tape, Param* p, bool train) {
  return train ? tape->leaf(p) : tape->constant(p->value);
}

Tape::Id dense_stack(Tape* tape, std::vector<DenseLayer>* layers, Tape::Id x,
                     bool train, bool sigmoid_out) {
  for (size_t i = 0; i < layers->size(); ++i) {
    DenseLayer& l = (*layers)[i];
    Tape::Id y = tape->matmul_nt(x, param_node(tape, &l.w, train));
    y = tape->add_row(y, param_node(tape, &l.b, train));
    if (i + 1 < layers->size()) {
      y = tape->relu(y);
    } else if (sigmoid_out) {
      y = tape->sigmoid(y);
    }
    x = y;
  }
  return x;
}

}  // namespace

ForwardGraph build_forward(Tape* tape, Model* model, const Batch& batch,
                           bool train) {
  const ModelSpec& spec = model->spec;
  TECA_CHECK(batch.center.cols() == spec.f_count,
             "batch has " << batch.center.cols() << " bins, model expects "
                          << spec.f_count);
  TECA_CHECK(static_cast<int>(batch.ctx.size()) == spec.context,
             "batch has " << batch.ctx.size() << " context slices, model "
                          << "expects " << spec.context);

  ForwardGraph g;
  Tape::Id features;  // input row to the dereverberation net

  if (spec.kind == ModelKind::kBaseline) {
    // Plain context flattening, context-major like the attention output.
    std::vector<Tape::Id> slices;
    slices.reserve(batch.ctx.size());
    for (const Matrix& s : batch.ctx) slices.push_back(tape->constant(s));
    features = tape->concat_cols(slices);
  } else {
    const attn::SubbandPartition& part = model->partition;
    std::vector<Tape::Id> weighted_parts, weight_parts;
    for (int b = 0; b < part.n_bands; ++b) {
      const int f0 = part.band_begin(b), f1 = part.band_end(b);
      const bool full = f0 == 0 && f1 == spec.f_count;
      std::vector<Tape::Id> slices;
      slices.reserve(batch.ctx.size());
      for (const Matrix& s : batch.ctx) {
        slices.push_back(tape->constant(full ? s : s.col_range(f0, f1)));
      }
      const Tape::Id center = tape->constant(
          full ? batch.center : batch.center.col_range(f0, f1));
      AttentionBand& band = model->bands[b];
      attn::AttentionGraph ag = attn::attention_band_graph(
          tape, slices, center, param_node(tape, &band.wq, train),
          param_node(tape, &band.wk, train),
          param_node(tape, &band.wv, train));
      weighted_parts.push_back(ag.weighted);
      weight_parts.push_back(ag.weights);
    }
    features = tape->concat_cols(weighted_parts);
    g.weights = weight_parts.size() == 1 ? weight_parts[0]
                                         : tape->concat_cols(weight_parts);
  }

  g.xhat = dense_stack(tape, &model->derev, features, train,
                       /*sigmoid_out=*/false);

  if (spec.rt60_head) {
    g.zhat = dense_stack(tape, &model->head, g.weights, train,
                         /*sigmoid_out=*/true);
  }

  if (batch.target.size() > 0) {
    g.derev_term = tape->mse(g.xhat, batch.target);
    if (spec.rt60_head) {
      TECA_CHECK(batch.z.size() > 0, "batch lacks RT60 labels");
      g.rt60_term = tape->mse(g.zhat, batch.z);
      g.loss = tape->add_scaled(g.derev_term, g.rt60_term, 1.0);
    } else {
      g.loss = g.derev_term;
    }
  }
  return g;
}

double derev_loss_term(const Matrix& x, const Matrix& xhat) {
  TECA_CHECK(x.same_shape(xhat), "joint_loss: X/Xhat dimension mismatch");
  double acc = 0.0;
  for (int r = 0; r < x.rows(); ++r) {
    const double* a = x.row(r);
    const double* b = xhat.row(r);
    for (int c = 0; c < x.cols(); ++c) {
      const double d = a[c] - b[c];
      acc += d * d;
    }
  }
  return acc / (static_cast<double>(x.rows()) * x.cols());
}

double rt60_loss_term(const Matrix& z, const Matrix& zhat) {
  TECA_CHECK(z.same_shape(zhat) && z.cols() == 1,
             "joint_loss: Z/Zhat must be T x 1");
  double acc = 0.0;
  for (int r = 0; r < z.rows(); ++r) {
    const double d = z(r, 0) - zhat(r, 0);
    acc += d * d;
  }
  return acc / static_cast<double>(z.rows());
}

double joint_loss(const Matrix& x, const Matrix& xhat, const Matrix& z,
                  const Matrix& zhat) {
  TECA_CHECK(x.rows() == z.rows(),
             "joint_loss: frame counts of X and Z differ");
  return derev_loss_term(x, xhat) + rt60_loss_term(z, zhat);
}

Matrix derev_forward(const Model& model, const Matrix& features) {
  TECA_CHECK(features.cols() == model.derev_input_width(),
             "derev_forward: feature width " << features.cols()
                                             << " does not match net input "
                                             << model.derev_input_width());
  Tape tape;
  Tape::Id x = tape.constant(features);
  Tape::Id y = dense_stack(&tape, &const_cast<Model&>(model).derev, x,
                           /*train=*/false, /*sigmoid_out=*/false);
  return tape.value(y);
}

Matrix rt60_forward(const Model& model, const Matrix& attention_rows) {
  TECA_CHECK(!model.head.empty(), "model has no RT60 head");
  TECA_CHECK(attention_rows.cols() == model.head_input_width(),
             "rt60_forward: row width " << attention_rows.cols()
                                        << " does not match head input "
                                        << model.head_input_width());
  Tape tape;
  Tape::Id x = tape.constant(attention_rows);
  Tape::Id y = dense_stack(&tape, &const_cast<Model&>(model).head, x,
                           /*train=*/false, /*sigmoid_out=*/true);
  return tape.value(y);
}

namespace {

// Features + context for one utterance, in normalized space.
struct UtteranceFeatures {
  dsp::ComplexSpectrogram spec;
  Batch batch;
};

UtteranceFeatures utterance_features(const Model& model, const Waveform& y) {
  TECA_CHECK(y.sample_rate == model.sample_rate,
             "sample rate mismatch: utterance at "
                 << y.sample_rate << " Hz, model expects " << model.sample_rate
                 << " Hz");
  TECA_CHECK(!model.stats.mean.empty(),
             "model has no normalization statistics (untrained checkpoint?)");
  TECA_CHECK(model.spec.f_count == model.stft.bins(),
             "model feature width does not match its STFT configuration");
  UtteranceFeatures out;
  out.spec = dsp::stft(y, model.stft);
  const Matrix norm =
      dsp::normalize(dsp::lps(out.spec, model.power_floor), model.stats);
  attn::ContextTensor ctx = attn::expand_context(norm, model.spec.context);
  out.batch.center = norm;
  out.batch.ctx = std::move(ctx.slices);
  return out;
}

}  // namespace

Prediction predict_utterance(const Model& model, const Waveform& y,
                             bool with_rt60) {
  UtteranceFeatures uf = utterance_features(model, y);
  Tape tape;
  ForwardGraph g = build_forward(&tape, &const_cast<Model&>(model), uf.batch,
                                 /*train=*/false);
  const Matrix est = dsp::denormalize(tape.value(g.xhat), model.stats);
  Waveform wave = dsp::reconstruct(est, uf.spec, model.stft, y.sample_rate);
  // The synthesis frame grid can overshoot the input; pin the length.
  wave.samples.resize(y.size(), 0.0);

  Prediction out;
  out.enhanced = std::move(wave);
  if (with_rt60) {
    TECA_CHECK(g.zhat >= 0, "model has no RT60 head");
    const Matrix& zhat = tape.value(g.zhat);
    double mean = 0.0;
    out.rt60_frames.resize(zhat.rows());
    for (int t = 0; t < zhat.rows(); ++t) {
      out.rt60_frames[t] = zhat(t, 0);
      mean += zhat(t, 0);
    }
    out.rt60_estimate = mean / zhat.rows();  // label scale: 1.0 s range
  }
  return out;
}

Matrix utterance_attention_weights(const Model& model, const Waveform& y) {
  TECA_CHECK(model.spec.kind != ModelKind::kBaseline, "no attention weights");
  UtteranceFeatures uf = utterance_features(model, y);
  Tape tape;
  ForwardGraph g = build_forward(&tape, &const_cast<Model&>(model), uf.batch,
                                 /*train=*/false);
  return tape.value(g.weights);
}

}  // namespace teca::net
