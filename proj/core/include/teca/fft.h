// core/include/teca/fft.h

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

#ifndef TECA_FFT_H_
#define TECA_FFT_H_

#include <complex>
#include <vector>

namespace teca {

// Iterative radix-2 FFT with precomputed twiddles. Sizes must be powers
// of two; 512 is the default analysis size across the toolkit.
class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }

  // In-place forward transform (no scaling).
  void forward(std::complex<double>* x) const;
  // In-place inverse transform (scaled by 1/n).
  void inverse(std::complex<double>* x) const;

  static bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

 private:
  void transform(std::complex<double>* x, bool inv) const;

  int n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> twiddle_;      // forward
  std::vector<std::complex<double>> twiddle_inv_;  // inverse
};

}  // namespace teca

#endif  // TECA_FFT_H_
