// core/include/teca/rir.h

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

#ifndef TECA_RIR_H_
#define TECA_RIR_H_

#include <array>
#include <cstdint>
#include <optional>

#include "teca/rng.h"
#include "teca/waveform.h"

namespace teca::rir {

// One simulated scenario: shoebox room, point source, point receiver.
struct RoomConfig {
  std::array<double, 3> dims{6.0, 5.0, 3.0};    // L, W, H in meters
  std::array<double, 3> source{2.0, 2.5, 1.5};  // meters
  std::array<double, 3> mic{4.0, 2.5, 1.5};     // meters
  double target_rt60 = 0.5;                     // seconds
  double speed_of_sound = 343.0;                // m/s
  int max_order = -1;  // -1: enough orders to cover 1.2 * target_rt60

  double volume() const { return dims[0] * dims[1] * dims[2]; }
  double surface() const {
    return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  }
  double src_mic_distance() const;
  void validate() const;  // source/mic strictly inside the room
};

struct SabineAbsorption {
  double alpha = 0.0;
  // Set when the Sabine relation implies alpha >= 1: the requested decay
  // cannot be realized in this room and alpha was clamped to 0.9999.
  bool unreachable = false;
};

// Uniform per-surface absorption from the Sabine relation
// alpha = 0.1611 * V / (S * rt60).
SabineAbsorption sabine_absorption(const std::array<double, 3>& dims,
                                   double target_rt60);

struct Rir {
  Waveform h;
  int direct_path_index = 0;
  RoomConfig scenario;
  uint64_t seed = 0;
};

// Allen-Berkley image method with fractional delays rendered by an 81-tap
// Hann-windowed sinc. Deterministic for a given (cfg, seed).
Rir simulate_rir(const RoomConfig& cfg, int sample_rate, uint64_t seed);

// RT60 by Schroeder backward integration: least-squares fit on the
// -5 dB .. -25 dB decay segment, extrapolated to 60 dB. Throws
// NumericError("decay range too short") when no usable segment exists.
double measure_rt60(const Waveform& h, int sample_rate);
double measure_rt60(const Rir& rir);

struct ReverbPair {
  Waveform reverberant;  // y = s * h, time-aligned to the direct path
  Waveform anechoic;     // x = direct-path component of y
  double rt60_true = 0.0;
  RoomConfig scenario;
  uint64_t seed = 0;
};

// Convolves `clean` with the RIR and aligns the result so that y and the
// direct-path reference x sit on the same time axis. When the RIR has no
// measurable decay (a bare impulse), rt60_true falls back to 0.01 s.
ReverbPair make_pair(const Waveform& clean, const Rir& rir);

// Sampling ranges for random scenarios.
struct ScenarioRanges {
  std::array<double, 3> room_min{3.0, 3.0, 2.5};
  std::array<double, 3> room_max{10.0, 8.0, 6.0};
  double wall_margin = 0.3;  // meters
  double dist_min = 0.5;     // meters
  double dist_max = 10.0;    // meters
  double rt60_min = 0.01;    // seconds
  double rt60_max = 1.0;     // seconds
  double speed_of_sound = 343.0;
};

// Rejection-samples a RoomConfig satisfying the geometric constraints.
RoomConfig sample_scenario(const ScenarioRanges& ranges, Rng* rng);

}  // namespace teca::rir

#endif  // TECA_RIR_H_
