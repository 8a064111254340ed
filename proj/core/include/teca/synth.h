// core/include/teca/synth.h

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

#ifndef TECA_SYNTH_H_
#define TECA_SYNTH_H_

#include <cstdint>

#include "teca/waveform.h"

namespace teca {

// Deterministic speech-like test signal: voiced syllables (glottal pulse
// train through gliding formant resonators) and unvoiced noise bursts
// under a syllabic envelope. Good enough to train and score
// dereverberation models without shipping a corpus.
Waveform synth_speech(uint64_t seed, double duration_s,
                      int sample_rate = kDefaultSampleRate);

}  // namespace teca

#endif  // TECA_SYNTH_H_
