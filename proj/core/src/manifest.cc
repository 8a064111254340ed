// core/src/manifest.cc

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

#include "teca/manifest.h"

#include <fstream>

#include <json.hpp>

#include "teca/errors.h"

namespace teca {

namespace {
using nlohmann::json;
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  TECA_CHECK(in.good(), "cannot open manifest: " << path);
  Manifest m;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("bad JSON at " + path + ":" + std::to_string(line_no) +
                      ": " + e.what());
    }
    if (!j.contains("id")) {
      // Header line.
      m.config_hash = j.value("config_hash", "");
      continue;
    }
    PairRecord r;
    r.id = j.at("id").get<std::string>();
    r.reverb_path = j.at("reverb_path").get<std::string>();
    r.anechoic_path = j.at("anechoic_path").get<std::string>();
    r.rt60 = j.at("rt60").get<double>();
    if (j.contains("room")) r.room = j.at("room").get<std::array<double, 3>>();
    if (j.contains("src")) r.src = j.at("src").get<std::array<double, 3>>();
    if (j.contains("mic")) r.mic = j.at("mic").get<std::array<double, 3>>();
    r.seed = j.value("seed", uint64_t{0});
    r.rir_path = j.value("rir_path", "");
    m.records.push_back(std::move(r));
  }
  return m;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  TECA_CHECK(out.good(), "cannot open manifest for writing: " << path);
  json header = {{"config_hash", manifest.config_hash},
                 {"kind", "corpus_manifest"},
                 {"pairs", manifest.records.size()}};
  out << header.dump() << "\n";
  for (const PairRecord& r : manifest.records) {
    json j = {{"id", r.id},
              {"reverb_path", r.reverb_path},
              {"anechoic_path", r.anechoic_path},
              {"rt60", r.rt60},
              {"room", r.room},
              {"src", r.src},
              {"mic", r.mic},
              {"seed", r.seed}};
    if (!r.rir_path.empty()) j["rir_path"] = r.rir_path;
    out << j.dump() << "\n";
  }
  TECA_CHECK(out.good(), "short write to manifest: " << path);
}

}  // namespace teca
