// core/include/teca/manifest.h

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

#ifndef TECA_MANIFEST_H_
#define TECA_MANIFEST_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace teca {

// One (reverberant, anechoic) pair of a corpus. `rir_path` is set only
// when the pair was rendered from an externally supplied response.
struct PairRecord {
  std::string id;
  std::string reverb_path;
  std::string anechoic_path;
  double rt60 = 0.0;
  std::array<double, 3> room{0, 0, 0};
  std::array<double, 3> src{0, 0, 0};
  std::array<double, 3> mic{0, 0, 0};
  uint64_t seed = 0;
  std::string rir_path;
};

// Line-delimited JSON, one record per pair, preceded by a header line
// carrying the resolved-config hash.
struct Manifest {
  std::string config_hash;
  std::vector<PairRecord> records;
};

Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace teca

#endif  // TECA_MANIFEST_H_
