// benchmarks/bench_attention.cc

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

#include <benchmark/benchmark.h>

#include "teca/attention.h"
#include "teca/rng.h"

using namespace teca;

namespace {

Matrix rand_m(int r, int c, uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// One second of frames through the fullband transform at full-scale
// dimensions (F=257, c=9, d_q=64).
void BM_fta_forward_one_second(benchmark::State& state) {
  const Matrix y = rand_m(62, 257, 1);
  const attn::ContextTensor ctx = attn::expand_context(y, 9);
  Rng rng(2);
  const attn::AttentionParams p =
      attn::init_attention_params(257, 64, 257, &rng);
  for (auto _ : state) {
    attn::AttentionOutput out = attn::fta_forward(ctx, y, p);
    benchmark::DoNotOptimize(out.weighted.data());
  }
}
BENCHMARK(BM_fta_forward_one_second);

void BM_sta_forward_one_second(benchmark::State& state) {
  const Matrix y = rand_m(62, 257, 3);
  const attn::ContextTensor ctx = attn::expand_context(y, 9);
  const auto part = attn::partition_bands(257, 8);
  Rng rng(4);
  std::vector<attn::AttentionParams> params;
  for (int b = 0; b < 8; ++b) {
    params.push_back(attn::init_attention_params(part.band_width(b), 64,
                                                 part.band_width(b), &rng));
  }
  for (auto _ : state) {
    attn::AttentionOutput out = attn::sta_forward(
        ctx, y, std::span<const attn::AttentionParams>(params), part);
    benchmark::DoNotOptimize(out.weighted.data());
  }
}
BENCHMARK(BM_sta_forward_one_second);

}  // namespace
