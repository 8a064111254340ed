// core/src/metrics.cc

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

#include "teca/metrics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "teca/errors.h"
#include "teca/fft.h"

namespace teca::metrics {

namespace {

constexpr int kBands = 23;
constexpr double kSegmentMs = 25.0;
constexpr double kWeightExponent = 0.2;
constexpr double kClampLo = -10.0;
constexpr double kClampHi = 35.0;
constexpr double kGateDb = -60.0;  // below the loudest reference segment

// Triangular mel filterbank over the one-sided power spectrum.
std::vector<std::vector<double>> mel_filterbank(int n_bins, int sample_rate,
                                                int fft_size) {
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  };
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(kBands + 2);
  for (int i = 0; i < kBands + 2; ++i) {
    centers[i] = mel_to_hz(mel_max * i / (kBands + 1));
  }
  std::vector<std::vector<double>> bank(kBands,
                                        std::vector<double>(n_bins, 0.0));
  const double hz_per_bin = static_cast<double>(sample_rate) / fft_size;
  for (int b = 0; b < kBands; ++b) {
    const double lo = centers[b], mid = centers[b + 1], hi = centers[b + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * hz_per_bin;
      if (f <= lo || f >= hi) continue;
      bank[b][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return bank;
}

}  // namespace

double fwsegsnr(const Waveform& ref, const Waveform& est) {
  TECA_CHECK(ref.size() == est.size(),
             "fwsegsnr: length mismatch (" << ref.size() << " vs "
                                           << est.size() << ")");
  TECA_CHECK(ref.sample_rate == est.sample_rate,
             "fwsegsnr: sample rate mismatch");
  TECA_CHECK(!ref.empty(), "fwsegsnr: empty input");

  const int rate = ref.sample_rate;
  const int seg_len = static_cast<int>(rate * kSegmentMs / 1000.0);
  const int hop = seg_len / 2;
  int fft_size = 1;
  while (fft_size < seg_len) fft_size <<= 1;
  const int n_bins = fft_size / 2 + 1;
  const Fft fft(fft_size);
  const auto bank = mel_filterbank(n_bins, rate, fft_size);

  std::vector<double> window(seg_len);
  for (int n = 0; n < seg_len; ++n) {
    window[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / seg_len));
  }

  // Energy gate relative to the loudest reference segment, so that a
  // common rescaling of both signals leaves the gated set unchanged.
  std::vector<double> seg_energies;
  for (size_t start = 0; start + seg_len <= ref.size(); start += hop) {
    double e = 0.0;
    for (int n = 0; n < seg_len; ++n) {
      const double r = ref.samples[start + n] * window[n];
      e += r * r;
    }
    seg_energies.push_back(e);
  }
  TECA_CHECK(!seg_energies.empty(), "fwsegsnr: input shorter than a segment");
  double peak_energy = 0.0;
  for (double e : seg_energies) peak_energy = std::max(peak_energy, e);
  const double gate_energy = peak_energy * std::pow(10.0, kGateDb / 10.0);

  std::vector<std::complex<double>> buf_ref(fft_size), buf_est(fft_size);
  double total = 0.0;
  int segments = 0;

  size_t seg_index = 0;
  for (size_t start = 0; start + seg_len <= ref.size(); start += hop) {
    const double seg_energy = seg_energies[seg_index++];
    if (seg_energy <= gate_energy) continue;  // silence gate on the reference
    for (int n = 0; n < fft_size; ++n) {
      double r = 0.0, e = 0.0;
      if (n < seg_len) {
        r = ref.samples[start + n] * window[n];
        e = est.samples[start + n] * window[n];
      }
      buf_ref[n] = {r, 0.0};
      buf_est[n] = {e, 0.0};
    }

    fft.forward(buf_ref.data());
    fft.forward(buf_est.data());

    // Per band: signal = geometric mean of the two band energies, error =
    // squared band-magnitude difference. A silent estimate zeroes the
    // numerator (clamp floor) and an identical one zeroes the error
    // (clamp ceiling); magnitude-domain error keeps the measure blind to
    // the reused reverberant phase.
    double num = 0.0, den = 0.0;
    for (int b = 0; b < kBands; ++b) {
      double band_ref = 0.0, band_est = 0.0;
      const std::vector<double>& filt = bank[b];
      for (int k = 0; k < n_bins; ++k) {
        if (filt[k] == 0.0) continue;
        band_ref += filt[k] * std::norm(buf_ref[k]);
        band_est += filt[k] * std::norm(buf_est[k]);
      }
      const double mag_ref = std::sqrt(band_ref);
      const double mag_est = std::sqrt(band_est);
      const double weight = std::pow(mag_ref, kWeightExponent);
      if (weight <= 0.0) continue;
      const double signal = mag_ref * mag_est;  // geometric-mean energy
      const double error = (mag_ref - mag_est) * (mag_ref - mag_est);
      const double snr_db = std::clamp(
          10.0 * std::log10((signal + 1e-300) / (error + 1e-300)),
          kClampLo, kClampHi);
      num += weight * snr_db;
      den += weight;
    }
    if (den <= 0.0) continue;
    // Per-segment clamp; also pins the all-bands-at-ceiling case to 35.0.
    total += std::clamp(num / den, kClampLo, kClampHi);
    ++segments;
  }
  TECA_CHECK(segments > 0, "fwsegsnr: no segments above the energy gate");
  return total / segments;
}

double lsd(const dsp::LpsMatrix& ref_lps, const dsp::LpsMatrix& est_lps) {
  TECA_CHECK(ref_lps.same_shape(est_lps), "lsd: dimension mismatch");
  TECA_CHECK(ref_lps.rows() > 0, "lsd: empty input");
  const double to_db = 10.0 / std::numbers::ln10;
  double acc = 0.0;
  for (int t = 0; t < ref_lps.rows(); ++t) {
    const double* a = ref_lps.row(t);
    const double* b = est_lps.row(t);
    double frame = 0.0;
    for (int f = 0; f < ref_lps.cols(); ++f) {
      const double d = to_db * (a[f] - b[f]);
      frame += d * d;
    }
    acc += std::sqrt(frame / ref_lps.cols());
  }
  return acc / ref_lps.rows();
}

double lsd_waveforms(const Waveform& ref, const Waveform& est,
                     const dsp::StftConfig& cfg, double power_floor) {
  return lsd(dsp::lps(dsp::stft(ref, cfg), power_floor),
             dsp::lps(dsp::stft(est, cfg), power_floor));
}

int rt60_bucket(double rt60) {
  return std::clamp(static_cast<int>(std::floor(rt60 * 10.0)), 0, 9);
}

MetricReport bucket_report(std::vector<UtteranceMetrics> utterances) {
  TECA_CHECK(!utterances.empty(), "bucket_report: no utterances");
  MetricReport report;
  for (UtteranceMetrics& u : utterances) {
    u.bucket = rt60_bucket(u.rt60);
    BucketStats& b = report.buckets[u.bucket];
    b.count += 1;
    b.mean_fwsegsnr += u.fwsegsnr_db;
    b.mean_lsd += u.lsd_db;
    report.mean_fwsegsnr += u.fwsegsnr_db;
    report.mean_lsd += u.lsd_db;
  }
  for (auto& [bucket, stats] : report.buckets) {
    stats.mean_fwsegsnr /= stats.count;
    stats.mean_lsd /= stats.count;
  }
  report.mean_fwsegsnr /= utterances.size();
  report.mean_lsd /= utterances.size();
  report.utterances = std::move(utterances);
  return report;
}

std::string format_report_table(const MetricReport& report,
                                const std::string& label) {
  std::ostringstream os;
  os << label << "\n";
  char buf[64];
  os << "  bucket   ";
  for (const auto& [bucket, stats] : report.buckets) {
    std::snprintf(buf, sizeof(buf), " %3.1f-%3.1f", bucket / 10.0,
                  (bucket + 1) / 10.0);
    os << buf;
  }
  os << "      Avg\n  fwSegSNR ";
  for (const auto& [bucket, stats] : report.buckets) {
    std::snprintf(buf, sizeof(buf), " %8.2f", stats.mean_fwsegsnr);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), " %8.2f\n", report.mean_fwsegsnr);
  os << buf << "  LSD      ";
  for (const auto& [bucket, stats] : report.buckets) {
    std::snprintf(buf, sizeof(buf), " %8.2f", stats.mean_lsd);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), " %8.2f\n", report.mean_lsd);
  os << buf;
  os << "  (count)  ";
  for (const auto& [bucket, stats] : report.buckets) {
    std::snprintf(buf, sizeof(buf), " %8d", stats.count);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), " %8zu\n", report.utterances.size());
  os << buf;
  return os.str();
}

}  // namespace teca::metrics
