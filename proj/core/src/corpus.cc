// core/src/corpus.cc

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

#include "teca/corpus.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include "teca/errors.h"
#include "teca/rng.h"

namespace teca::corpus {

namespace fs = std::filesystem;

std::vector<std::string> list_wavs(const std::string& dir) {
  TECA_CHECK(fs::is_directory(dir), "not a directory: " << dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct PairResult {
  bool ok = false;
  PairRecord record;
};

std::string utterance_id(const std::string& path, size_t index) {
  std::string stem = fs::path(path).stem().string();
  if (stem.empty()) stem = "utt";
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05zu", index);
  return std::string(buf) + "_" + stem;
}

}  // namespace

Manifest build_corpus(const std::vector<std::string>& clean_paths,
                      const CorpusConfig& cfg, const std::string& out_dir,
                      const std::string& config_hash) {
  TECA_CHECK(!clean_paths.empty(), "no clean utterances given");
  fs::create_directories(out_dir);

  std::vector<std::string> external_rirs;
  if (!cfg.rir_dir.empty()) {
    external_rirs = list_wavs(cfg.rir_dir);
    TECA_CHECK(!external_rirs.empty(),
               "no .wav responses found in " << cfg.rir_dir);
  }

  std::vector<PairResult> results(clean_paths.size());
  std::atomic<size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= clean_paths.size()) return;
      try {
        const Waveform clean =
            read_wav_checked(clean_paths[i], cfg.sample_rate);
        TECA_CHECK(!clean.empty(), "empty clean file: " << clean_paths[i]);
        const uint64_t seed = Rng::derive(cfg.seed, i);

        rir::Rir impulse;
        std::string rir_path;
        if (external_rirs.empty()) {
          Rng rng(seed);
          const rir::RoomConfig room = rir::sample_scenario(cfg.ranges, &rng);
          impulse = rir::simulate_rir(room, cfg.sample_rate, seed);
        } else {
          rir_path = external_rirs[i % external_rirs.size()];
          impulse.h = read_wav_checked(rir_path, cfg.sample_rate);
          impulse.seed = seed;
          // Unknown geometry: take the strongest tap as the direct path.
          int best = 0;
          double best_mag = -1.0;
          for (size_t k = 0; k < impulse.h.size(); ++k) {
            const double m = std::abs(impulse.h.samples[k]);
            if (m > best_mag) {
              best_mag = m;
              best = static_cast<int>(k);
            }
          }
          impulse.direct_path_index = best;
        }

        const rir::ReverbPair pair = rir::make_pair(clean, impulse);
        const std::string id = utterance_id(clean_paths[i], i);
        PairRecord rec;
        rec.id = id;
        rec.reverb_path = (fs::path(out_dir) / (id + "_reverb.wav")).string();
        rec.anechoic_path =
            (fs::path(out_dir) / (id + "_anechoic.wav")).string();
        rec.rt60 = pair.rt60_true;
        rec.seed = seed;
        rec.rir_path = rir_path;
        if (rir_path.empty()) {
          rec.room = pair.scenario.dims;
          rec.src = pair.scenario.source;
          rec.mic = pair.scenario.mic;
        }
        write_wav(rec.reverb_path, pair.reverberant, cfg.wav_format);
        write_wav(rec.anechoic_path, pair.anechoic, cfg.wav_format);
        results[i].ok = true;
        results[i].record = std::move(rec);
      } catch (const std::exception& e) {
        std::cerr << "warning: skipping " << clean_paths[i] << ": "
                  << e.what() << "\n";
      }
    }
  };

  unsigned n_workers = cfg.workers > 0
                           ? static_cast<unsigned>(cfg.workers)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(
      n_workers, static_cast<unsigned>(clean_paths.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  Manifest manifest;
  manifest.config_hash = config_hash;
  for (PairResult& r : results) {
    if (r.ok) manifest.records.push_back(std::move(r.record));
  }
  TECA_CHECK(!manifest.records.empty(), "no pairs could be generated");
  write_manifest((fs::path(out_dir) / "manifest.jsonl").string(), manifest);
  return manifest;
}

}  // namespace teca::corpus
