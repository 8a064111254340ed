// benchmarks/bench_stft.cc

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

#include "teca/dsp.h"
#include "teca/synth.h"

using namespace teca;

namespace {

void BM_stft_one_second(benchmark::State& state) {
  const Waveform w = synth_speech(1, 1.0);
  const dsp::StftConfig cfg;
  for (auto _ : state) {
    auto spec = dsp::stft(w, cfg);
    benchmark::DoNotOptimize(spec.v.data());
  }
}
BENCHMARK(BM_stft_one_second);

void BM_stft_roundtrip_one_second(benchmark::State& state) {
  const Waveform w = synth_speech(2, 1.0);
  const dsp::StftConfig cfg;
  for (auto _ : state) {
    Waveform back = dsp::istft(dsp::stft(w, cfg), cfg);
    benchmark::DoNotOptimize(back.samples.data());
  }
}
BENCHMARK(BM_stft_roundtrip_one_second);

}  // namespace
