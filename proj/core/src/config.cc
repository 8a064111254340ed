// core/src/config.cc

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

#include "teca/config.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "teca/errors.h"

namespace teca {

namespace {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw UsageError("unknown config key \"" + key + "\" in " + where);
    }
  }
}

template <typename T>
void maybe(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

json to_json(const RunConfig& c) {
  return json{
      {"stft",
       {{"fft_size", c.stft.fft_size},
        {"win_len", c.stft.win_len},
        {"hop", c.stft.hop},
        {"window", c.stft.window}}},
      {"power_floor", c.power_floor},
      {"sample_rate", c.sample_rate},
      {"model", c.model},
      {"context", c.context},
      {"subbands", c.subbands},
      {"d_q", c.d_q},
      {"d_v", c.d_v},
      {"derev_hidden", c.derev_hidden},
      {"rt60_head", c.rt60_head},
      {"head_hidden", c.head_hidden},
      {"train",
       {{"lr_init", c.train.lr_init},
        {"lr_decrement", c.train.lr_decrement},
        {"lr_floor", c.train.lr_floor},
        {"plateau_patience", c.train.plateau_patience},
        {"batch_size", c.train.batch_size},
        {"max_epochs", c.train.max_epochs},
        {"seed", c.train.seed}}},
      {"corpus",
       {{"room_min", c.corpus.ranges.room_min},
        {"room_max", c.corpus.ranges.room_max},
        {"wall_margin", c.corpus.ranges.wall_margin},
        {"dist_min", c.corpus.ranges.dist_min},
        {"dist_max", c.corpus.ranges.dist_max},
        {"rt60_min", c.corpus.ranges.rt60_min},
        {"rt60_max", c.corpus.ranges.rt60_max},
        {"speed_of_sound", c.corpus.ranges.speed_of_sound},
        {"seed", c.corpus.seed},
        {"workers", c.corpus.workers}}}};
}

void apply_json(const json& j, RunConfig* c) {
  require_keys(j,
               {"stft", "power_floor", "sample_rate", "model", "context",
                "subbands", "d_q", "d_v", "derev_hidden", "rt60_head",
                "head_hidden", "train", "corpus"},
               "config root");
  if (j.contains("stft")) {
    const json& s = j.at("stft");
    require_keys(s, {"fft_size", "win_len", "hop", "window"}, "stft");
    maybe(s, "fft_size", &c->stft.fft_size);
    maybe(s, "win_len", &c->stft.win_len);
    maybe(s, "hop", &c->stft.hop);
    maybe(s, "window", &c->stft.window);
  }
  maybe(j, "power_floor", &c->power_floor);
  maybe(j, "sample_rate", &c->sample_rate);
  maybe(j, "model", &c->model);
  maybe(j, "context", &c->context);
  maybe(j, "subbands", &c->subbands);
  maybe(j, "d_q", &c->d_q);
  maybe(j, "d_v", &c->d_v);
  maybe(j, "derev_hidden", &c->derev_hidden);
  maybe(j, "rt60_head", &c->rt60_head);
  maybe(j, "head_hidden", &c->head_hidden);
  if (j.contains("train")) {
    const json& t = j.at("train");
    require_keys(t,
                 {"lr_init", "lr_decrement", "lr_floor", "plateau_patience",
                  "batch_size", "max_epochs", "seed"},
                 "train");
    maybe(t, "lr_init", &c->train.lr_init);
    maybe(t, "lr_decrement", &c->train.lr_decrement);
    maybe(t, "lr_floor", &c->train.lr_floor);
    maybe(t, "plateau_patience", &c->train.plateau_patience);
    maybe(t, "batch_size", &c->train.batch_size);
    maybe(t, "max_epochs", &c->train.max_epochs);
    maybe(t, "seed", &c->train.seed);
  }
  if (j.contains("corpus")) {
    const json& k = j.at("corpus");
    require_keys(k,
                 {"room_min", "room_max", "wall_margin", "dist_min",
                  "dist_max", "rt60_min", "rt60_max", "speed_of_sound",
                  "seed", "workers"},
                 "corpus");
    maybe(k, "room_min", &c->corpus.ranges.room_min);
    maybe(k, "room_max", &c->corpus.ranges.room_max);
    maybe(k, "wall_margin", &c->corpus.ranges.wall_margin);
    maybe(k, "dist_min", &c->corpus.ranges.dist_min);
    maybe(k, "dist_max", &c->corpus.ranges.dist_max);
    maybe(k, "rt60_min", &c->corpus.ranges.rt60_min);
    maybe(k, "rt60_max", &c->corpus.ranges.rt60_max);
    maybe(k, "speed_of_sound", &c->corpus.ranges.speed_of_sound);
    maybe(k, "seed", &c->corpus.seed);
    maybe(k, "workers", &c->corpus.workers);
  }
  c->corpus.sample_rate = c->sample_rate;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  TECA_CHECK(in.good(), "cannot open config: " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config JSON: ") + e.what());
  }
  RunConfig c;
  apply_json(j, &c);
  return c;
}

std::string RunConfig::to_json_text(int indent) const {
  return to_json(*this).dump(indent);
}

std::string RunConfig::hash() const {
  const std::string canon = to_json(*this).dump();  // nlohmann sorts keys
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

net::ModelSpec RunConfig::model_spec() const {
  net::ModelSpec spec;
  spec.kind = net::model_kind_from_string(model);
  spec.f_count = stft.bins();
  spec.context = context;
  spec.n_bands = subbands;
  spec.d_q = d_q;
  spec.d_v = d_v;
  spec.derev_hidden = derev_hidden;
  spec.rt60_head = rt60_head;
  spec.head_hidden = head_hidden;
  return spec;
}

}  // namespace teca
