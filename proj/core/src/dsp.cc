// core/src/dsp.cc

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

#include "teca/dsp.h"

#include <cmath>
#include <numbers>

#include "teca/errors.h"
#include "teca/fft.h"

namespace teca::dsp {

std::vector<double> StftConfig::window_values() const {
  std::vector<double> w(win_len);
  if (window == "hann") {
    // Periodic Hann: exact COLA at hop = win_len/2.
    for (int n = 0; n < win_len; ++n) {
      w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / win_len));
    }
  } else if (window == "rect") {
    for (int n = 0; n < win_len; ++n) w[n] = 1.0;
  } else {
    throw DataError("unknown window: " + window);
  }
  return w;
}

void StftConfig::validate() const {
  TECA_CHECK(fft_size > 0 && win_len > 0 && hop > 0, "STFT sizes must be > 0");
  TECA_CHECK(hop <= win_len && win_len <= fft_size,
             "need hop <= win_len <= fft_size");
  TECA_CHECK(Fft::is_power_of_two(fft_size),
             "fft_size must be a power of two, got " << fft_size);
  // Constant overlap-add: the shifted window copies must sum to the same
  // constant at every phase, to 1e-10 relative.
  const std::vector<double> w = window_values();
  std::vector<double> cola(hop, 0.0);
  for (int n = 0; n < win_len; ++n) cola[n % hop] += w[n];
  double lo = cola[0], hi = cola[0];
  for (double v : cola) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  TECA_CHECK(hi > 0 && (hi - lo) / hi < 1e-10,
             "window/hop pair does not satisfy constant overlap-add");
}

int num_frames(size_t len, const StftConfig& cfg) {
  if (len <= static_cast<size_t>(cfg.win_len)) return 1;
  const size_t over = len - cfg.win_len;
  return static_cast<int>((over + cfg.hop - 1) / cfg.hop) + 1;
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  TECA_CHECK(!w.empty(), "empty input");
  cfg.validate();

  const int t_count = num_frames(w.size(), cfg);
  const int f_count = cfg.bins();
  const std::vector<double> win = cfg.window_values();
  const Fft fft(cfg.fft_size);

  ComplexSpectrogram spec(t_count, f_count);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (int t = 0; t < t_count; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.fft_size; ++n) {
      const size_t idx = start + n;
      const double s =
          (n < cfg.win_len && idx < w.size()) ? w.samples[idx] * win[n] : 0.0;
      buf[n] = {s, 0.0};
    }
    fft.forward(buf.data());
    for (int f = 0; f < f_count; ++f) spec.at(t, f) = buf[f];
  }
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg,
               int sample_rate) {
  cfg.validate();
  TECA_CHECK(spec.frames >= 1, "empty spectrogram");
  TECA_CHECK(spec.bins == cfg.bins(),
             "spectrogram has " << spec.bins << " bins, config expects "
                                << cfg.bins());

  const int out_len = (spec.frames - 1) * cfg.hop + cfg.win_len;
  const std::vector<double> win = cfg.window_values();
  const Fft fft(cfg.fft_size);

  std::vector<double> num(out_len, 0.0);
  std::vector<double> den(out_len, 0.0);
  std::vector<std::complex<double>> buf(cfg.fft_size);

  for (int t = 0; t < spec.frames; ++t) {
    // Hermitian extension of the one-sided spectrum.
    for (int f = 0; f < spec.bins; ++f) buf[f] = spec.at(t, f);
    for (int f = spec.bins; f < cfg.fft_size; ++f) {
      buf[f] = std::conj(spec.at(t, cfg.fft_size - f));
    }
    fft.inverse(buf.data());
    const int start = t * cfg.hop;
    for (int n = 0; n < cfg.win_len; ++n) {
      num[start + n] += win[n] * buf[n].real();
      den[start + n] += win[n] * win[n];
    }
  }

  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(out_len);
  // The coverage floor keeps barely-windowed edge samples from being
  // amplified when frame magnitudes were modified before synthesis.
  for (int n = 0; n < out_len; ++n) {
    out.samples[n] = num[n] / std::max(den[n], 1e-3);
  }
  return out;
}

LpsMatrix lps(const ComplexSpectrogram& spec, double power_floor) {
  TECA_CHECK(power_floor > 0, "power_floor must be > 0");
  LpsMatrix out(spec.frames, spec.bins);
  for (int t = 0; t < spec.frames; ++t) {
    for (int f = 0; f < spec.bins; ++f) {
      out(t, f) = std::log(std::max(std::norm(spec.at(t, f)), power_floor));
    }
  }
  return out;
}

Waveform reconstruct(const LpsMatrix& est_lps,
                     const ComplexSpectrogram& reverberant_spec,
                     const StftConfig& cfg, int sample_rate) {
  TECA_CHECK(est_lps.rows() == reverberant_spec.frames &&
                 est_lps.cols() == reverberant_spec.bins,
             "LPS/spectrogram dimension mismatch: "
                 << est_lps.rows() << "x" << est_lps.cols() << " vs "
                 << reverberant_spec.frames << "x" << reverberant_spec.bins);
  ComplexSpectrogram out(reverberant_spec.frames, reverberant_spec.bins);
  for (int t = 0; t < out.frames; ++t) {
    for (int f = 0; f < out.bins; ++f) {
      const double mag = std::exp(0.5 * est_lps(t, f));
      const std::complex<double> z = reverberant_spec.at(t, f);
      const double r = std::abs(z);
      // Zero reverberant bin carries no phase; fall back to zero phase.
      out.at(t, f) = r > 0.0 ? z * (mag / r) : std::complex<double>(mag, 0.0);
    }
  }
  return istft(out, cfg, sample_rate);
}

NormStats compute_norm_stats(std::span<const LpsMatrix> corpus) {
  size_t total_frames = 0;
  int f_count = 0;
  for (const LpsMatrix& m : corpus) {
    if (m.rows() == 0) continue;
    if (f_count == 0) f_count = m.cols();
    TECA_CHECK(m.cols() == f_count, "inconsistent bin counts across corpus");
    total_frames += m.rows();
  }
  TECA_CHECK(total_frames > 0, "empty corpus");

  NormStats s;
  s.mean.assign(f_count, 0.0);
  s.std.assign(f_count, 0.0);
  for (const LpsMatrix& m : corpus) {
    for (int t = 0; t < m.rows(); ++t) {
      const double* r = m.row(t);
      for (int f = 0; f < f_count; ++f) s.mean[f] += r[f];
    }
  }
  for (int f = 0; f < f_count; ++f) s.mean[f] /= static_cast<double>(total_frames);
  for (const LpsMatrix& m : corpus) {
    for (int t = 0; t < m.rows(); ++t) {
      const double* r = m.row(t);
      for (int f = 0; f < f_count; ++f) {
        const double d = r[f] - s.mean[f];
        s.std[f] += d * d;
      }
    }
  }
  for (int f = 0; f < f_count; ++f) {
    // Population variance; the floor keeps constant bins usable.
    s.std[f] = std::max(std::sqrt(s.std[f] / static_cast<double>(total_frames)),
                        1e-8);
  }
  return s;
}

LpsMatrix normalize(const LpsMatrix& x, const NormStats& s) {
  TECA_CHECK(static_cast<size_t>(x.cols()) == s.mean.size(),
             "normalize: bin count mismatch");
  LpsMatrix out(x.rows(), x.cols());
  for (int t = 0; t < x.rows(); ++t) {
    for (int f = 0; f < x.cols(); ++f) {
      out(t, f) = (x(t, f) - s.mean[f]) / s.std[f];
    }
  }
  return out;
}

LpsMatrix denormalize(const LpsMatrix& x, const NormStats& s) {
  TECA_CHECK(static_cast<size_t>(x.cols()) == s.mean.size(),
             "denormalize: bin count mismatch");
  LpsMatrix out(x.rows(), x.cols());
  for (int t = 0; t < x.rows(); ++t) {
    for (int f = 0; f < x.cols(); ++f) {
      out(t, f) = x(t, f) * s.std[f] + s.mean[f];
    }
  }
  return out;
}

}  // namespace teca::dsp
