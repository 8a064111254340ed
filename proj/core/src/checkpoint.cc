// core/src/checkpoint.cc

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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "teca/errors.h"
#include "teca/network.h"

namespace teca::net {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'C', 'A'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

using nlohmann::json;

void write_block(std::ofstream& os, const double* data, size_t count) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(count * sizeof(double)));
}

void read_block(std::ifstream& is, double* data, size_t count,
                const std::string& path) {
  is.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  TECA_CHECK(is.gcount() ==
                 static_cast<std::streamsize>(count * sizeof(double)),
             "truncated checkpoint: " << path);
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  json meta;
  meta["kind"] = to_string(model.spec.kind);
  meta["f_count"] = model.spec.f_count;
  meta["context"] = model.spec.context;
  meta["n_bands"] = model.spec.n_bands;
  meta["d_q"] = model.spec.d_q;
  meta["d_v"] = model.spec.d_v;
  meta["derev_hidden"] = model.spec.derev_hidden;
  meta["rt60_head"] = model.spec.rt60_head;
  meta["head_hidden"] = model.spec.head_hidden;
  meta["stft"] = {{"fft_size", model.stft.fft_size},
                  {"win_len", model.stft.win_len},
                  {"hop", model.stft.hop},
                  {"window", model.stft.window}};
  meta["power_floor"] = model.power_floor;
  meta["sample_rate"] = model.sample_rate;
  meta["partition"] = model.partition.edges;
  meta["config_hash"] = model.config_hash;
  json params = json::array();
  for (const Param* p : model.parameters()) {
    params.push_back(
        {{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  }
  meta["params"] = params;
  meta["norm_bins"] = model.stats.mean.size();

  const std::string meta_str = meta.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  TECA_CHECK(os.good(), "cannot open checkpoint for writing: " << path);
  os.write(kMagic, 4);
  const uint32_t version = kVersion;
  os.write(reinterpret_cast<const char*>(&version), 4);
  const uint64_t meta_len = meta_str.size();
  os.write(reinterpret_cast<const char*>(&meta_len), 8);
  os.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const Param* p : model.parameters()) {
    write_block(os, p->value.data(), p->value.size());
  }
  write_block(os, model.stats.mean.data(), model.stats.mean.size());
  write_block(os, model.stats.std.data(), model.stats.std.size());
  TECA_CHECK(os.good(), "short write to checkpoint: " << path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TECA_CHECK(is.good(), "cannot open checkpoint: " << path);

  char magic[4];
  is.read(magic, 4);
  TECA_CHECK(is.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0,
             "not a checkpoint file (bad magic): " << path);
  uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  TECA_CHECK(version == kVersion,
             "unsupported checkpoint version " << version << ": " << path);
  uint64_t meta_len = 0;
  is.read(reinterpret_cast<char*>(&meta_len), 8);
  std::string meta_str(meta_len, '\0');
  is.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
  TECA_CHECK(is.gcount() == static_cast<std::streamsize>(meta_len),
             "truncated checkpoint metadata: " << path);

  json meta;
  try {
    meta = json::parse(meta_str);
  } catch (const json::exception& e) {
    throw DataError("bad checkpoint metadata in " + path + ": " + e.what());
  }

  ModelSpec spec;
  spec.kind = model_kind_from_string(meta.at("kind").get<std::string>());
  spec.f_count = meta.at("f_count").get<int>();
  spec.context = meta.at("context").get<int>();
  spec.n_bands = meta.at("n_bands").get<int>();
  spec.d_q = meta.at("d_q").get<int>();
  spec.d_v = meta.at("d_v").get<int>();
  spec.derev_hidden = meta.at("derev_hidden").get<std::vector<int>>();
  spec.rt60_head = meta.at("rt60_head").get<bool>();
  spec.head_hidden = meta.at("head_hidden").get<std::vector<int>>();

  dsp::StftConfig stft;
  stft.fft_size = meta.at("stft").at("fft_size").get<int>();
  stft.win_len = meta.at("stft").at("win_len").get<int>();
  stft.hop = meta.at("stft").at("hop").get<int>();
  stft.window = meta.at("stft").at("window").get<std::string>();

  Model model = init_model(spec, stft, meta.at("power_floor").get<double>(),
                           meta.at("sample_rate").get<int>(), /*seed=*/0);
  model.config_hash = meta.value("config_hash", "");

  const auto edges = meta.at("partition").get<std::vector<int>>();
  TECA_CHECK(edges == model.partition.edges,
             "checkpoint partition does not match its own spec: " << path);

  const auto param_meta = meta.at("params");
  std::vector<Param*> params = model.parameters();
  TECA_CHECK(param_meta.size() == params.size(),
             "checkpoint parameter list mismatch: " << path);
  for (size_t i = 0; i < params.size(); ++i) {
    TECA_CHECK(param_meta[i].at("name").get<std::string>() == params[i]->name &&
                   param_meta[i].at("rows").get<int>() ==
                       params[i]->value.rows() &&
                   param_meta[i].at("cols").get<int>() ==
                       params[i]->value.cols(),
               "checkpoint parameter " << i << " mismatch: " << path);
    read_block(is, params[i]->value.data(), params[i]->value.size(), path);
  }
  const size_t norm_bins = meta.at("norm_bins").get<size_t>();
  model.stats.mean.resize(norm_bins);
  model.stats.std.resize(norm_bins);
  read_block(is, model.stats.mean.data(), norm_bins, path);
  read_block(is, model.stats.std.data(), norm_bins, path);
  return model;
}

}  // namespace teca::net
