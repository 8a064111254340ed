// tests/test_trainer.cc

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

#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "teca/corpus.h"
#include "teca/errors.h"
#include "teca/rng.h"
#include "teca/synth.h"
#include "teca/trainer.h"
#include "teca/wav_io.h"

using namespace teca;
using net::Model;
using net::ModelKind;
using net::ModelSpec;

namespace {

Matrix random_matrix(int r, int c, uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

dsp::StftConfig small_stft() {
  dsp::StftConfig cfg;
  cfg.fft_size = 64;
  cfg.win_len = 64;
  cfg.hop = 32;
  return cfg;
}

// Toy batch in normalized-feature space for a given model spec.
net::Batch toy_batch(const ModelSpec& spec, int frames, uint64_t seed) {
  net::Batch b;
  b.center = random_matrix(frames, spec.f_count, seed);
  for (int k = 0; k < spec.context; ++k) {
    b.ctx.push_back(random_matrix(frames, spec.f_count, seed + 10 + k));
  }
  b.ctx[(spec.context - 1) / 2] = b.center;  // offset 0 is the frame itself
  b.target = random_matrix(frames, spec.f_count, seed + 50);
  b.z = Matrix(frames, 1);
  Rng rng(seed + 99);
  for (int t = 0; t < frames; ++t) b.z(t, 0) = rng.uniform(0.05, 0.95);
  return b;
}

ModelSpec toy_spec(ModelKind kind, bool head) {
  ModelSpec spec;
  spec.kind = kind;
  spec.f_count = 8;
  spec.context = 3;
  spec.n_bands = 2;
  spec.d_q = 4;
  spec.d_v = 4;
  spec.derev_hidden = {8};
  spec.rt60_head = head;
  spec.head_hidden = {8, 8};
  return spec;
}

}  // namespace

TEST_CASE("tape: d(w^2)/dw = 2w exactly") {
  Param w("w", Matrix(1, 1));
  w.value(0, 0) = 3.0;
  Tape tape;
  const Tape::Id x = tape.leaf(&w);
  const Tape::Id loss = tape.mse(x, Matrix(1, 1));  // (w - 0)^2
  CHECK(tape.value(loss)(0, 0) == 9.0);
  tape.backward(loss);
  CHECK(w.grad(0, 0) == 6.0);
}

TEST_CASE("tape: backward rejects non-scalar roots") {
  Tape tape;
  const Tape::Id x = tape.constant(Matrix(2, 2));
  CHECK_THROWS_AS(tape.backward(x), DataError);
}

TEST_CASE("gradients vanish at an exact fit") {
  ModelSpec spec = toy_spec(ModelKind::kFta, true);
  Model model = net::init_model(spec, small_stft(), 1e-12, 16000, 3);
  net::Batch batch = toy_batch(spec, 6, 4);
  {
    Tape tape;
    net::ForwardGraph g = net::build_forward(&tape, &model, batch, false);
    batch.target = tape.value(g.xhat);
    batch.z = tape.value(g.zhat);
  }
  Tape tape;
  net::ForwardGraph g = net::build_forward(&tape, &model, batch, true);
  CHECK(tape.value(g.loss)(0, 0) == 0.0);
  model.zero_grads();
  tape.backward(g.loss);
  for (Param* p : model.parameters()) {
    for (size_t k = 0; k < p->grad.size(); ++k) {
      CHECK(std::abs(p->grad.data()[k]) < 1e-12);
    }
  }
}

TEST_CASE("gradcheck: fta, sta, baseline and joint pipelines < 1e-4") {
  const dsp::StftConfig stft = small_stft();
  {
    ModelSpec spec = toy_spec(ModelKind::kFta, false);
    Model m = net::init_model(spec, stft, 1e-12, 16000, 11);
    CHECK(train::gradcheck(&m, toy_batch(spec, 5, 21)) < 1e-4);
  }
  {
    ModelSpec spec = toy_spec(ModelKind::kSta, false);
    Model m = net::init_model(spec, stft, 1e-12, 16000, 12);
    CHECK(train::gradcheck(&m, toy_batch(spec, 5, 22)) < 1e-4);
  }
  {
    ModelSpec spec = toy_spec(ModelKind::kBaseline, false);
    Model m = net::init_model(spec, stft, 1e-12, 16000, 13);
    CHECK(train::gradcheck(&m, toy_batch(spec, 5, 23)) < 1e-4);
  }
  {
    // Joint objective through softmax, broadcast and sigmoid.
    ModelSpec spec = toy_spec(ModelKind::kSta, true);
    Model m = net::init_model(spec, stft, 1e-12, 16000, 14);
    CHECK(train::gradcheck(&m, toy_batch(spec, 5, 24)) < 1e-4);
  }
}

TEST_CASE("adam: first step, zero gradient, symmetry, closed form") {
  Param a("a", Matrix(1, 1));
  Param b("b", Matrix(1, 1));
  a.value(0, 0) = 1.5;
  b.value(0, 0) = 1.5;
  std::vector<Param*> params{&a, &b};
  train::AdamState state;
  state.init(params);

  a.grad(0, 0) = 1.0;
  b.grad(0, 0) = 1.0;
  train::adam_step(params, &state, 1e-4);
  // First-step bias correction makes the update -lr / (1 + eps').
  CHECK(a.value(0, 0) == doctest::Approx(1.5 - 1e-4).epsilon(1e-9));
  CHECK(a.value(0, 0) == b.value(0, 0));  // equal gradients, equal updates

  // Zero gradients leave parameters alone (moments decay, update is 0).
  Param c("c", Matrix(1, 1));
  c.value(0, 0) = 2.0;
  std::vector<Param*> just_c{&c};
  train::AdamState sc;
  sc.init(just_c);
  c.grad(0, 0) = 0.0;
  train::adam_step(just_c, &sc, 1e-3);
  CHECK(c.value(0, 0) == 2.0);

  // Hand-fed moment state matches the closed-form update.
  Param d("d", Matrix(1, 1));
  d.value(0, 0) = 0.7;
  std::vector<Param*> just_d{&d};
  train::AdamState sd;
  sd.init(just_d);
  sd.step = 9;
  sd.m[0](0, 0) = 0.3;
  sd.v[0](0, 0) = 0.02;
  d.grad(0, 0) = -0.4;
  const double m_new = 0.9 * 0.3 + 0.1 * (-0.4);
  const double v_new = 0.999 * 0.02 + 0.001 * 0.16;
  const double mhat = m_new / (1.0 - std::pow(0.9, 10));
  const double vhat = v_new / (1.0 - std::pow(0.999, 10));
  const double want = 0.7 - 1e-2 * mhat / (std::sqrt(vhat) + 1e-8);
  train::adam_step(just_d, &sd, 1e-2);
  CHECK(d.value(0, 0) == doctest::Approx(want).epsilon(1e-12));

  // NaN gradients abort before any mutation.
  Param e("e", Matrix(1, 1));
  std::vector<Param*> just_e{&e};
  train::AdamState se;
  se.init(just_e);
  e.grad(0, 0) = std::nan("");
  CHECK_THROWS_AS(train::adam_step(just_e, &se, 1e-3), NumericError);
}

TEST_CASE("plateau schedule decrements once after three flat epochs") {
  train::PlateauSchedule sched(1e-4, 1e-5, 1e-6, 3);
  CHECK(sched.observe(1.0));  // first epoch is an improvement over +inf
  CHECK(sched.lr == 1e-4);
  CHECK_FALSE(sched.observe(1.0));
  CHECK(sched.lr == 1e-4);
  CHECK_FALSE(sched.observe(1.0));
  CHECK(sched.lr == 1e-4);
  CHECK_FALSE(sched.observe(1.0));  // third flat epoch: decrement
  CHECK(sched.lr == doctest::Approx(9e-5).epsilon(1e-12));
  CHECK_FALSE(sched.observe(1.0));  // stall restarted, no second decrement
  CHECK(sched.lr == doctest::Approx(9e-5).epsilon(1e-12));

  // The floor holds.
  train::PlateauSchedule low(2e-6, 1e-5, 1e-6, 1);
  low.observe(1.0);
  low.observe(1.0);
  CHECK(low.lr == 1e-6);
}

TEST_CASE("a fixed batch is overfit to below 1% of the initial loss") {
  ModelSpec spec = toy_spec(ModelKind::kFta, true);
  spec.f_count = 16;
  spec.derev_hidden = {16};
  Model model = net::init_model(spec, small_stft(), 1e-12, 16000, 31);
  const net::Batch batch = toy_batch(spec, 16, 32);

  std::vector<Param*> params = model.parameters();
  train::AdamState adam;
  adam.init(params);

  double initial = -1.0, final = -1.0;
  for (int step = 0; step < 500; ++step) {
    Tape tape;
    net::ForwardGraph g = net::build_forward(&tape, &model, batch, true);
    final = tape.value(g.loss)(0, 0);
    if (step == 0) initial = final;
    model.zero_grads();
    tape.backward(g.loss);
    train::adam_step(params, &adam, 1e-2);
  }
  CHECK(final < 1e-2 * initial);
}

TEST_CASE("fit: loss decreases, reruns are identical, log is written") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "teca_fit_test";
  fs::remove_all(base);
  fs::create_directories(base / "clean");

  std::vector<std::string> clean;
  for (int i = 0; i < 6; ++i) {
    const std::string p =
        (base / "clean" / ("c" + std::to_string(i) + ".wav")).string();
    write_wav(p, synth_speech(400 + i, 0.5));
    clean.push_back(p);
  }
  corpus::CorpusConfig ccfg;
  ccfg.seed = 9;
  ccfg.ranges.rt60_min = 0.15;
  ccfg.ranges.rt60_max = 0.4;
  const Manifest all =
      corpus::build_corpus(clean, ccfg, (base / "corpus").string(), "h");
  Manifest train_m, val_m;
  train_m.records.assign(all.records.begin(), all.records.begin() + 4);
  val_m.records.assign(all.records.begin() + 4, all.records.end());

  dsp::StftConfig stft;
  stft.fft_size = 128;
  stft.win_len = 128;
  stft.hop = 64;

  ModelSpec spec;
  spec.kind = ModelKind::kFta;
  spec.f_count = stft.bins();
  spec.context = 3;
  spec.d_q = 8;
  spec.d_v = 8;
  spec.derev_hidden = {16};
  spec.rt60_head = true;
  spec.head_hidden = {8};

  train::TrainConfig tcfg;
  tcfg.max_epochs = 3;
  tcfg.lr_init = 1e-3;
  tcfg.seed = 2024;

  const train::FitResult r1 =
      train::fit(train_m, val_m, tcfg, spec, stft, 1e-12, 16000, "hash1");
  const train::FitResult r2 =
      train::fit(train_m, val_m, tcfg, spec, stft, 1e-12, 16000, "hash1");

  REQUIRE(r1.log.size() == 3);
  CHECK(r1.log.back().val_loss < r1.log.front().val_loss * 1.01);
  for (size_t i = 0; i < r1.log.size(); ++i) {
    CHECK(r1.log[i].train_loss == r2.log[i].train_loss);
    CHECK(r1.log[i].val_loss == r2.log[i].val_loss);
    CHECK(r1.log[i].derev_term == r2.log[i].derev_term);
    CHECK(r1.log[i].rt60_term == r2.log[i].rt60_term);
    CHECK(r1.log[i].val_loss ==
          doctest::Approx(r1.log[i].derev_term + r1.log[i].rt60_term)
              .epsilon(1e-12));
  }
  const auto p1 = r1.model.parameters();
  const auto p2 = r2.model.parameters();
  for (size_t i = 0; i < p1.size(); ++i) {
    for (size_t k = 0; k < p1[i]->value.size(); ++k) {
      CHECK(p1[i]->value.data()[k] == p2[i]->value.data()[k]);
    }
  }

  train::write_training_log((base / "log.jsonl").string(), r1.log);
  CHECK(fs::file_size(base / "log.jsonl") > 0);
  fs::remove_all(base);
}
