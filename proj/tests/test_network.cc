// tests/test_network.cc

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
#include <cstdio>
#include <filesystem>

#include <doctest.h>

#include "teca/errors.h"
#include "teca/network.h"
#include "teca/rng.h"
#include "teca/synth.h"

using namespace teca;
using net::Model;
using net::ModelKind;
using net::ModelSpec;

namespace {

Matrix random_matrix(int r, int c, uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  }
  return m;
}

ModelSpec baseline_spec(int f_count, int c, std::vector<int> hidden) {
  ModelSpec spec;
  spec.kind = ModelKind::kBaseline;
  spec.f_count = f_count;
  spec.context = c;
  spec.derev_hidden = std::move(hidden);
  spec.rt60_head = false;
  return spec;
}

dsp::StftConfig small_stft() {
  dsp::StftConfig cfg;
  cfg.fft_size = 64;
  cfg.win_len = 64;
  cfg.hop = 32;
  return cfg;
}

}  // namespace

TEST_CASE("derev_forward: zeros, identity, hand-computed net") {
  // Zero weights, zero biases -> zero output.
  Model zero = net::init_model(baseline_spec(4, 1, {3}), small_stft(),
                               1e-12, 16000, 1);
  for (Param* p : zero.parameters()) p->value.fill(0.0);
  const Matrix out0 = net::derev_forward(zero, random_matrix(5, 4, 2));
  for (size_t i = 0; i < out0.size(); ++i) CHECK(out0.data()[i] == 0.0);

  // A single identity-weight linear layer passes the input through.
  Model ident = net::init_model(baseline_spec(4, 1, {}), small_stft(),
                                1e-12, 16000, 1);
  REQUIRE(ident.derev.size() == 1);
  ident.derev[0].w.value.fill(0.0);
  for (int i = 0; i < 4; ++i) ident.derev[0].w.value(i, i) = 1.0;
  ident.derev[0].b.value.fill(0.0);
  const Matrix x = random_matrix(3, 4, 3);
  const Matrix out1 = net::derev_forward(ident, x);
  for (int t = 0; t < 3; ++t) {
    for (int f = 0; f < 4; ++f) CHECK(out1(t, f) == x(t, f));
  }

  // Two-unit hidden net, one input, hand arithmetic.
  Model tiny = net::init_model(baseline_spec(1, 1, {2}), small_stft(),
                               1e-12, 16000, 1);
  tiny.derev[0].w.value(0, 0) = 2.0;   // h1 = relu(2x + 0.5)
  tiny.derev[0].w.value(1, 0) = -1.0;  // h2 = relu(-x + 1)
  tiny.derev[0].b.value(0, 0) = 0.5;
  tiny.derev[0].b.value(0, 1) = 1.0;
  tiny.derev[1].w.value(0, 0) = 3.0;  // y = 3 h1 - 2 h2 + 0.25
  tiny.derev[1].w.value(0, 1) = -2.0;
  tiny.derev[1].b.value(0, 0) = 0.25;
  Matrix in(1, 1);
  in(0, 0) = 0.75;
  // h1 = relu(1.5 + 0.5) = 2, h2 = relu(0.25) = 0.25, y = 6 - 0.5 + 0.25.
  CHECK(net::derev_forward(tiny, in)(0, 0) == doctest::Approx(5.75).epsilon(1e-15));

  CHECK_THROWS_AS(net::derev_forward(tiny, random_matrix(1, 3, 4)), DataError);
}

TEST_CASE("derev_forward is frame-local under row permutation") {
  Model m = net::init_model(baseline_spec(6, 1, {5}), small_stft(), 1e-12,
                            16000, 9);
  const Matrix x = random_matrix(4, 6, 5);
  Matrix perm(4, 6);
  const int order[4] = {2, 0, 3, 1};
  for (int t = 0; t < 4; ++t) {
    for (int f = 0; f < 6; ++f) perm(t, f) = x(order[t], f);
  }
  const Matrix y = net::derev_forward(m, x);
  const Matrix yp = net::derev_forward(m, perm);
  for (int t = 0; t < 4; ++t) {
    for (int f = 0; f < 6; ++f) CHECK(yp(t, f) == y(order[t], f));
  }
}

TEST_CASE("rt60_forward: sigmoid midpoint, open interval, hand case") {
  ModelSpec spec;
  spec.kind = ModelKind::kFta;
  spec.f_count = 4;
  spec.context = 3;
  spec.d_q = 2;
  spec.d_v = 2;
  spec.derev_hidden = {4};
  spec.rt60_head = true;
  spec.head_hidden = {3};
  Model m = net::init_model(spec, small_stft(), 1e-12, 16000, 2);

  Model zeroed = m;
  for (net::DenseLayer& l : zeroed.head) {
    l.w.value.fill(0.0);
    l.b.value.fill(0.0);
  }
  const Matrix rows = random_matrix(6, 3, 6);
  const Matrix z0 = net::rt60_forward(zeroed, rows);
  for (int t = 0; t < 6; ++t) CHECK(z0(t, 0) == 0.5);

  const Matrix z = net::rt60_forward(m, random_matrix(6, 3, 7));
  for (int t = 0; t < 6; ++t) {
    CHECK(z(t, 0) > 0.0);
    CHECK(z(t, 0) < 1.0);
  }

  // Single-unit head: z = sigmoid(w a + b).
  ModelSpec one = spec;
  one.head_hidden = {};
  Model m1 = net::init_model(one, small_stft(), 1e-12, 16000, 3);
  REQUIRE(m1.head.size() == 1);
  m1.head[0].w.value(0, 0) = 0.5;
  m1.head[0].w.value(0, 1) = -1.0;
  m1.head[0].w.value(0, 2) = 2.0;
  m1.head[0].b.value(0, 0) = 0.1;
  Matrix a(1, 3);
  a(0, 0) = 0.2;
  a(0, 1) = 0.3;
  a(0, 2) = 0.5;
  const double pre = 0.5 * 0.2 - 1.0 * 0.3 + 2.0 * 0.5 + 0.1;
  CHECK(net::rt60_forward(m1, a)(0, 0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-pre))).epsilon(1e-15));

  CHECK_THROWS_AS(net::rt60_forward(m1, random_matrix(1, 5, 8)), DataError);
}

TEST_CASE("joint loss: zero, hand value 1.25, quadratic scaling, split") {
  Matrix x(1, 2), xhat(1, 2), z(1, 1), zhat(1, 1);
  x(0, 0) = 0.0;
  x(0, 1) = 0.0;
  xhat(0, 0) = 1.0;
  xhat(0, 1) = 1.0;
  z(0, 0) = 0.0;
  zhat(0, 0) = 0.5;
  CHECK(net::joint_loss(x, x, z, z) == 0.0);
  CHECK(net::joint_loss(x, xhat, z, zhat) == doctest::Approx(1.25).epsilon(1e-15));

  // Doubling the dereverberation residual quadruples the first term only.
  Matrix xhat2 = xhat;
  xhat2(0, 0) = 2.0;
  xhat2(0, 1) = 2.0;
  CHECK(net::derev_loss_term(x, xhat2) ==
        doctest::Approx(4.0 * net::derev_loss_term(x, xhat)).epsilon(1e-15));
  CHECK(net::rt60_loss_term(z, zhat) == 0.25);

  // Terms recompose to the joint value.
  const Matrix rx = random_matrix(7, 5, 9);
  const Matrix rxh = random_matrix(7, 5, 10);
  const Matrix rz = random_matrix(7, 1, 11);
  const Matrix rzh = random_matrix(7, 1, 12);
  CHECK(net::joint_loss(rx, rxh, rz, rzh) ==
        doctest::Approx(net::derev_loss_term(rx, rxh) +
                        net::rt60_loss_term(rz, rzh))
            .epsilon(1e-12));

  Matrix bad(2, 2);
  CHECK_THROWS_AS(net::joint_loss(x, bad, z, zhat), DataError);
}

TEST_CASE("checkpoint round trip is bit-exact and predictions match") {
  ModelSpec spec;
  spec.kind = ModelKind::kSta;
  spec.f_count = 33;  // 64-point fft
  spec.context = 5;
  spec.n_bands = 4;
  spec.d_q = 6;
  spec.d_v = 0;
  spec.derev_hidden = {16, 16};
  spec.rt60_head = true;
  spec.head_hidden = {8};
  Model m = net::init_model(spec, small_stft(), 1e-12, 16000, 77);
  m.config_hash = "cafe0123";
  // Plausible stats so predict() can run.
  m.stats.mean.assign(33, -5.0);
  m.stats.std.assign(33, 2.0);

  const std::string path =
      (std::filesystem::temp_directory_path() / "teca_ckpt_test.teca")
          .string();
  net::save_checkpoint(m, path);
  const Model loaded = net::load_checkpoint(path);

  CHECK(loaded.config_hash == "cafe0123");
  CHECK(loaded.spec.n_bands == 4);
  const auto pa = m.parameters();
  const auto pb = loaded.parameters();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    REQUIRE(pa[i]->value.size() == pb[i]->value.size());
    for (size_t k = 0; k < pa[i]->value.size(); ++k) {
      CHECK(pa[i]->value.data()[k] == pb[i]->value.data()[k]);
    }
  }
  for (size_t f = 0; f < 33; ++f) {
    CHECK(loaded.stats.mean[f] == m.stats.mean[f]);
    CHECK(loaded.stats.std[f] == m.stats.std[f]);
  }

  const Waveform y = synth_speech(5, 0.3);
  const net::Prediction a = net::predict_utterance(m, y, true);
  const net::Prediction b = net::predict_utterance(loaded, y, true);
  REQUIRE(a.enhanced.size() == y.size());
  for (size_t i = 0; i < a.enhanced.size(); ++i) {
    CHECK(a.enhanced.samples[i] == b.enhanced.samples[i]);
  }
  CHECK(*a.rt60_estimate == *b.rt60_estimate);

  std::remove(path.c_str());
}

TEST_CASE("predict_utterance: determinism, length, rate check") {
  ModelSpec spec;
  spec.kind = ModelKind::kFta;
  spec.f_count = 33;
  spec.context = 3;
  spec.d_q = 4;
  spec.d_v = 8;
  spec.derev_hidden = {12};
  Model m = net::init_model(spec, small_stft(), 1e-12, 16000, 5);
  m.stats.mean.assign(33, -4.0);
  m.stats.std.assign(33, 1.5);

  const Waveform y = synth_speech(6, 0.37);  // odd length vs frame grid
  const net::Prediction p1 = net::predict_utterance(m, y);
  const net::Prediction p2 = net::predict_utterance(m, y);
  CHECK(p1.enhanced.size() == y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    CHECK(p1.enhanced.samples[i] == p2.enhanced.samples[i]);
  }
  CHECK_FALSE(p1.rt60_estimate.has_value());

  Waveform wrong_rate = y;
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(net::predict_utterance(m, wrong_rate), DataError);

  // No RT60 head on this model: asking for diagnostics fails.
  CHECK_THROWS_AS(net::predict_utterance(m, y, true), DataError);

  // Baseline checkpoints expose no attention weights.
  Model base = net::init_model(baseline_spec(33, 3, {8}), small_stft(),
                               1e-12, 16000, 6);
  base.stats = m.stats;
  CHECK_THROWS_WITH_AS(net::utterance_attention_weights(base, y),
                       "no attention weights", DataError);
}

TEST_CASE("the rt60 head is rejected on baseline models") {
  ModelSpec spec;
  spec.kind = ModelKind::kBaseline;
  spec.f_count = 33;
  spec.rt60_head = true;
  CHECK_THROWS_AS(spec.validate(), DataError);
}
