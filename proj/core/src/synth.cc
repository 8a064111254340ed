// core/src/synth.cc

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

#include "teca/synth.h"

#include <cmath>
#include <numbers>

#include "teca/errors.h"
#include "teca/rng.h"

namespace teca {

namespace {

// Two-pole resonator at (freq, bandwidth); unity gain at the pole peak is
// not needed here, relative shaping is what matters.
struct Resonator {
  double b0 = 1.0, a1 = 0.0, a2 = 0.0;
  double y1 = 0.0, y2 = 0.0;

  void set(double freq, double bandwidth, int rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth / rate);
    const double theta = 2.0 * std::numbers::pi * freq / rate;
    a1 = 2.0 * r * std::cos(theta);
    a2 = -r * r;
    b0 = (1.0 - r * r) * 0.5;
  }
  double step(double x) {
    const double y = b0 * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

Waveform synth_speech(uint64_t seed, double duration_s, int sample_rate) {
  TECA_CHECK(duration_s > 0 && sample_rate > 0, "bad synth parameters");
  Rng rng(seed);
  const int total = static_cast<int>(duration_s * sample_rate);
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(total, 0.0);

  const double f0_base = rng.uniform(95.0, 230.0);

  int at = 0;
  while (at < total) {
    // Syllables at a rough 4-7 Hz rate with short inter-syllable dips;
    // formants and pitch glide within each syllable so neighboring frames
    // stay spectrally distinct.
    const int syl_len =
        static_cast<int>(rng.uniform(0.08, 0.20) * sample_rate);
    const int gap_len =
        static_cast<int>(rng.uniform(0.008, 0.028) * sample_rate);
    const bool voiced = rng.uniform() < 0.75;
    const double amp = rng.uniform(0.5, 1.0);

    const int n = std::min(syl_len, total - at);
    if (voiced) {
      Resonator f1, f2, f3;
      const double f1a = rng.uniform(280, 900), f1b = rng.uniform(280, 900);
      const double f2a = rng.uniform(900, 2400), f2b = rng.uniform(900, 2400);
      const double f3a = rng.uniform(2300, 3400), f3b = rng.uniform(2300, 3400);
      const double f0 = f0_base * rng.uniform(0.8, 1.25);
      const double f0_glide = rng.uniform(-0.3, 0.3);
      double phase = rng.uniform(0.0, 1.0);
      double lp1 = 0.0, lp2 = 0.0;  // -12 dB/oct glottal shaping
      for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / std::max(1, n - 1);
        f1.set(f1a + (f1b - f1a) * u, 90.0, sample_rate);
        f2.set(f2a + (f2b - f2a) * u, 140.0, sample_rate);
        f3.set(f3a + (f3b - f3a) * u, 200.0, sample_rate);
        const double f0_now = f0 * (1.0 + f0_glide * u);
        phase += f0_now / sample_rate;
        double pulse = 0.0;
        if (phase >= 1.0) {
          phase -= 1.0;
          pulse = 1.0;
        }
        lp1 += 0.6 * (pulse - lp1);
        lp2 += 0.6 * (lp1 - lp2);
        const double src = lp2 + 0.02 * rng.normal();  // aspiration
        const double v = f1.step(src) + 0.7 * f2.step(src) + 0.4 * f3.step(src);
        // Raised-cosine envelope with a floor: syllables dip rather than
        // cut to digital silence, as connected speech does.
        const double env =
            0.12 + 0.88 * 0.5 *
                       (1.0 - std::cos(2.0 * std::numbers::pi * std::min(u, 1.0)));
        out.samples[at + i] = amp * env * v;
      }
    } else {
      Resonator band;
      band.set(rng.uniform(2000, 6000), 1500.0, sample_rate);
      for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / std::max(1, n - 1);
        const double env =
            0.12 + 0.88 * 0.5 *
                       (1.0 - std::cos(2.0 * std::numbers::pi * std::min(u, 1.0)));
        out.samples[at + i] = 0.25 * amp * env * band.step(rng.normal());
      }
    }
    at += n + gap_len;
  }

  // A quiet voiced murmur under everything keeps inter-syllable frames
  // speech-like instead of numerically silent.
  {
    Resonator m1, m2;
    m1.set(f0_base * 3.0, 150.0, sample_rate);
    m2.set(900.0, 300.0, sample_rate);
    double phase = 0.0, lp = 0.0;
    for (int i = 0; i < total; ++i) {
      phase += f0_base / sample_rate;
      double pulse = 0.0;
      if (phase >= 1.0) {
        phase -= 1.0;
        pulse = 1.0;
      }
      lp += 0.5 * (pulse - lp);
      out.samples[i] += 0.015 * (m1.step(lp) + 0.5 * m2.step(lp));
    }
  }

  // Normalize to a 0.3 peak.
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double s = 0.3 / peak;
    for (double& v : out.samples) v *= s;
  }
  return out;
}

}  // namespace teca
