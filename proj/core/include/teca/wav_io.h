// core/include/teca/wav_io.h

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

#ifndef TECA_WAV_IO_H_
#define TECA_WAV_IO_H_

#include <string>

#include "teca/waveform.h"

namespace teca {

enum class WavFormat {
  kPcm16,    // 16-bit signed PCM
  kFloat32,  // IEEE float
};

// Reads a RIFF/WAVE file. Mono only; PCM 16-bit and IEEE float-32 are the
// accepted sample formats. Any other layout raises DataError. The file's
// sample rate is returned as-is; rate policy is the caller's.
Waveform read_wav(const std::string& path);

// As read_wav but additionally rejects files whose rate differs from
// `required_rate` (there is no resampling in this toolkit).
Waveform read_wav_checked(const std::string& path, int required_rate);

// Writes a mono RIFF/WAVE file. kPcm16 clamps to [-1, 1] before
// quantizing; kFloat32 stores samples verbatim (narrowed to float).
void write_wav(const std::string& path, const Waveform& w,
               WavFormat format = WavFormat::kFloat32);

}  // namespace teca

#endif  // TECA_WAV_IO_H_
