// core/include/teca/metrics.h

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

#ifndef TECA_METRICS_H_
#define TECA_METRICS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teca/dsp.h"
#include "teca/waveform.h"

namespace teca::metrics {

// Frequency-weighted segmental SNR in dB: 25 ms / 50%-overlap segments,
// 23 mel-spaced bands, band weights = reference band magnitude^0.2,
// per-band clamp [-10, 35] dB, averaged over segments whose reference
// energy clears a -60 dBFS gate.
double fwsegsnr(const Waveform& ref, const Waveform& est);

// Log-spectral distance in dB between two natural-log LPS matrices:
// mean over frames of sqrt(mean over bins of (10/ln10 * (ref-est))^2).
double lsd(const dsp::LpsMatrix& ref_lps, const dsp::LpsMatrix& est_lps);

// Waveform convenience wrapper around lsd().
double lsd_waveforms(const Waveform& ref, const Waveform& est,
                     const dsp::StftConfig& cfg,
                     double power_floor = dsp::kDefaultPowerFloor);

struct UtteranceMetrics {
  std::string id;
  double rt60 = 0.0;
  int bucket = 0;  // floor(rt60 * 10), clamped to [0, 9]
  double fwsegsnr_db = 0.0;
  double lsd_db = 0.0;
};

struct BucketStats {
  int count = 0;
  double mean_fwsegsnr = 0.0;
  double mean_lsd = 0.0;
};

// Table-style rollup: one column per populated 0.1 s RT60 bucket plus the
// overall mean. Empty buckets are absent, not zero.
struct MetricReport {
  std::vector<UtteranceMetrics> utterances;
  std::map<int, BucketStats> buckets;
  double mean_fwsegsnr = 0.0;
  double mean_lsd = 0.0;
  // Out-of-scope external measures stay in the schema as placeholders.
  std::optional<double> pesq;
  std::optional<double> stoi;
  std::optional<double> wer;
};

int rt60_bucket(double rt60);

MetricReport bucket_report(std::vector<UtteranceMetrics> utterances);

// Renders the report as an aligned text table (bucket columns + Avg).
std::string format_report_table(const MetricReport& report,
                                const std::string& label);

}  // namespace teca::metrics

#endif  // TECA_METRICS_H_
