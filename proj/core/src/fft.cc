// core/src/fft.cc

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

#include "teca/fft.h"

#include <cmath>
#include <numbers>

#include "teca/errors.h"

namespace teca {

Fft::Fft(int n) : n_(n) {
  TECA_CHECK(is_power_of_two(n), "FFT size must be a power of two, got " << n);
  bitrev_.resize(n);
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b) {
      if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
    }
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  twiddle_inv_.resize(n / 2);
  for (int i = 0; i < n / 2; ++i) {
    const double ang = -2.0 * std::numbers::pi * i / n;
    twiddle_[i] = {std::cos(ang), std::sin(ang)};
    twiddle_inv_[i] = {std::cos(ang), -std::sin(ang)};
  }
}

void Fft::transform(std::complex<double>* x, bool inv) const {
  const auto& tw = inv ? twiddle_inv_ : twiddle_;
  for (int i = 0; i < n_; ++i) {
    int j = bitrev_[i];
    if (j > i) std::swap(x[i], x[j]);
  }
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len >> 1;
    const int stride = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        const std::complex<double> w = tw[k * stride];
        std::complex<double>& a = x[start + k];
        std::complex<double>& b = x[start + k + half];
        const std::complex<double> t = w * b;
        b = a - t;
        a += t;
      }
    }
  }
}

void Fft::forward(std::complex<double>* x) const { transform(x, false); }

void Fft::inverse(std::complex<double>* x) const {
  transform(x, true);
  const double s = 1.0 / n_;
  for (int i = 0; i < n_; ++i) x[i] *= s;
}

}  // namespace teca
