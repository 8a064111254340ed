// core/include/teca/dsp.h

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

#ifndef TECA_DSP_H_
#define TECA_DSP_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "teca/matrix.h"
#include "teca/waveform.h"

namespace teca::dsp {

// T x F log-power-spectrum features (natural log), one frame per row.
using LpsMatrix = Matrix;

inline constexpr double kDefaultPowerFloor = 1e-12;

// Analysis/synthesis configuration. The defaults are a 512-point FFT with
// a 32 ms window and 16 ms shift at 16 kHz. The window/hop pair must
// satisfy constant overlap-add; validate() checks it to 1e-10 relative.
struct StftConfig {
  int fft_size = 512;
  int win_len = 512;
  int hop = 256;
  std::string window = "hann";  // "hann" (periodic) or "rect"

  int bins() const { return fft_size / 2 + 1; }
  std::vector<double> window_values() const;
  void validate() const;
};

// T x F one-sided complex spectra, frame-major storage.
struct ComplexSpectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<std::complex<double>> v;

  ComplexSpectrogram() = default;
  ComplexSpectrogram(int t, int f)
      : frames(t), bins(f), v(static_cast<size_t>(t) * f) {}

  std::complex<double>& at(int t, int f) {
    return v[static_cast<size_t>(t) * bins + f];
  }
  const std::complex<double>& at(int t, int f) const {
    return v[static_cast<size_t>(t) * bins + f];
  }
};

// Per-frequency-bin normalization statistics.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
};

// Frame count for a signal of `len` samples: every sample is covered, the
// tail is zero-padded to complete the final frame, and a short signal
// still produces one frame.
int num_frames(size_t len, const StftConfig& cfg);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add inverse; output length is (T-1)*hop + win_len.
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg,
               int sample_rate = kDefaultSampleRate);

// values[t][f] = ln(max(|spec[t][f]|^2, power_floor)).
LpsMatrix lps(const ComplexSpectrogram& spec,
              double power_floor = kDefaultPowerFloor);

// Magnitude from est_lps, phase from reverberant_spec, then istft.
Waveform reconstruct(const LpsMatrix& est_lps,
                     const ComplexSpectrogram& reverberant_spec,
                     const StftConfig& cfg,
                     int sample_rate = kDefaultSampleRate);

// Per-bin mean/std over all frames of all inputs; population variance,
// std floored at 1e-8.
NormStats compute_norm_stats(std::span<const LpsMatrix> corpus);

LpsMatrix normalize(const LpsMatrix& x, const NormStats& s);
LpsMatrix denormalize(const LpsMatrix& x, const NormStats& s);

}  // namespace teca::dsp

#endif  // TECA_DSP_H_
