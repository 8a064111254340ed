// benchmarks/bench_rir.cc

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

#include "teca/rir.h"

using namespace teca;

namespace {

void BM_simulate_rir(benchmark::State& state) {
  rir::RoomConfig cfg;
  cfg.target_rt60 = state.range(0) / 10.0;
  for (auto _ : state) {
    rir::Rir r = rir::simulate_rir(cfg, 16000, 1);
    benchmark::DoNotOptimize(r.h.samples.data());
  }
}
BENCHMARK(BM_simulate_rir)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_measure_rt60(benchmark::State& state) {
  rir::RoomConfig cfg;
  cfg.target_rt60 = 0.5;
  const rir::Rir r = rir::simulate_rir(cfg, 16000, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rir::measure_rt60(r));
  }
}
BENCHMARK(BM_measure_rt60)->Unit(benchmark::kMillisecond);

}  // namespace
