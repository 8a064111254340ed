// benchmarks/bench_gemm.cc

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

#include "teca/matrix.h"
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

// The two shapes that dominate a training step: value projections over a
// gathered context batch and the first dereverberation layer.
void BM_gemm_value_projection(benchmark::State& state) {
  const Matrix a = rand_m(144, 257, 1);
  const Matrix b = rand_m(64, 257, 2);
  Matrix c(144, 64);
  for (auto _ : state) {
    gemm_nt(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2ll * 144 * 257 * 64);
}
BENCHMARK(BM_gemm_value_projection);

void BM_gemm_derev_layer1(benchmark::State& state) {
  const Matrix a = rand_m(16, 2313, 3);
  const Matrix b = rand_m(128, 2313, 4);
  Matrix c(16, 128);
  for (auto _ : state) {
    gemm_nt(a, b, &c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2ll * 16 * 2313 * 128);
}
BENCHMARK(BM_gemm_derev_layer1);

}  // namespace
