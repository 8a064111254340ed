// core/include/teca/config.h

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

#ifndef TECA_CONFIG_H_
#define TECA_CONFIG_H_

#include <string>
#include <vector>

#include "teca/corpus.h"
#include "teca/dsp.h"
#include "teca/network.h"
#include "teca/trainer.h"

namespace teca {

// Every tunable of the toolkit in one structured document. Loadable from
// JSON (unknown keys are rejected), overridable by CLI flags, and hashed
// into every artifact for provenance.
struct RunConfig {
  dsp::StftConfig stft;
  double power_floor = dsp::kDefaultPowerFloor;
  int sample_rate = kDefaultSampleRate;

  std::string model = "fta";  // baseline | fta | sta
  int context = 9;
  int subbands = 8;
  int d_q = 64;
  int d_v = 0;  // 0: band width
  std::vector<int> derev_hidden = {2048, 2048, 2048};
  bool rt60_head = false;
  std::vector<int> head_hidden = {64, 64};

  train::TrainConfig train;
  corpus::CorpusConfig corpus;

  // Parses JSON and overlays it on the defaults. Unknown keys anywhere in
  // the document raise UsageError.
  static RunConfig load(const std::string& path);
  static RunConfig from_json_text(const std::string& text);

  std::string to_json_text(int indent = 2) const;
  // FNV-1a hash of the canonical dump; stable provenance id.
  std::string hash() const;

  net::ModelSpec model_spec() const;
};

}  // namespace teca

#endif  // TECA_CONFIG_H_
