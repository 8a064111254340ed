// core/include/teca/corpus.h

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

#ifndef TECA_CORPUS_H_
#define TECA_CORPUS_H_

#include <string>
#include <vector>

#include "teca/manifest.h"
#include "teca/rir.h"
#include "teca/wav_io.h"

namespace teca::corpus {

struct CorpusConfig {
  rir::ScenarioRanges ranges;
  uint64_t seed = 1;
  int sample_rate = kDefaultSampleRate;
  // When set, WAV responses from this directory are used round-robin
  // instead of simulated ones.
  std::string rir_dir;
  WavFormat wav_format = WavFormat::kFloat32;
  int workers = 0;  // 0: hardware concurrency
};

// Renders one (reverberant, anechoic) pair per clean utterance into
// out_dir and returns the manifest (also written to out_dir/manifest.jsonl).
// Unreadable clean files are skipped with a warning; zero successes is an
// error. Deterministic for a fixed (clean list, config) regardless of
// worker count.
Manifest build_corpus(const std::vector<std::string>& clean_paths,
                      const CorpusConfig& cfg, const std::string& out_dir,
                      const std::string& config_hash);

// Sorted *.wav listing of a directory.
std::vector<std::string> list_wavs(const std::string& dir);

}  // namespace teca::corpus

#endif  // TECA_CORPUS_H_
