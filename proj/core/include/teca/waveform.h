// core/include/teca/waveform.h

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

#ifndef TECA_WAVEFORM_H_
#define TECA_WAVEFORM_H_

#include <cstddef>
#include <vector>

namespace teca {

inline constexpr int kDefaultSampleRate = 16000;

// Mono time-domain audio, nominal amplitude range [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  double energy() const {
    double e = 0.0;
    for (double v : samples) e += v * v;
    return e;
  }
};

}  // namespace teca

#endif  // TECA_WAVEFORM_H_
