// core/src/matrix.cc

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

#include "teca/matrix.h"

#include <cmath>
#include <thread>

#include "teca/errors.h"

namespace teca {

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix Matrix::col_range(int c0, int c1) const {
  TECA_CHECK(0 <= c0 && c0 <= c1 && c1 <= cols_, "col_range out of bounds");
  Matrix out(rows_, c1 - c0);
  for (int r = 0; r < rows_; ++r) {
    const double* src = row(r) + c0;
    double* dst = out.row(r);
    for (int c = 0; c < c1 - c0; ++c) dst[c] = src[c];
  }
  return out;
}

namespace {

// Row-range worker dispatch. Splitting output rows across threads keeps
// every output element's summation order fixed, so results do not depend
// on the thread count.
template <typename Fn>
void parallel_rows(int m, size_t flops, Fn fn) {
  constexpr size_t kParallelThreshold = 1u << 21;  // ~2 Mflop
  unsigned hw = std::thread::hardware_concurrency();
  if (flops < kParallelThreshold || hw < 2 || m < 8) {
    fn(0, m);
    return;
  }
  int half = m / 2;
  std::thread t([&] { fn(0, half); });
  fn(half, m);
  t.join();
}

}  // namespace

void gemm_nt(const Matrix& a, const Matrix& b, Matrix* c) {
  const int m = a.rows(), k = a.cols(), n = b.rows();
  TECA_CHECK(b.cols() == k, "gemm_nt: inner dimensions differ");
  TECA_CHECK(c->rows() == m && c->cols() == n, "gemm_nt: bad output shape");
  const size_t flops = 2ull * m * n * k;
  parallel_rows(m, flops, [&](int r0, int r1) {
    for (int i = r0; i < r1; ++i) {
      const double* ai = a.row(i);
      double* ci = c->row(i);
      int j = 0;
      // Four B rows at a time: one pass over ai feeds four dot products.
      for (; j + 4 <= n; j += 4) {
        const double* b0 = b.row(j);
        const double* b1 = b.row(j + 1);
        const double* b2 = b.row(j + 2);
        const double* b3 = b.row(j + 3);
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        for (int p = 0; p < k; ++p) {
          const double av = ai[p];
          s0 += av * b0[p];
          s1 += av * b1[p];
          s2 += av * b2[p];
          s3 += av * b3[p];
        }
        ci[j] = s0;
        ci[j + 1] = s1;
        ci[j + 2] = s2;
        ci[j + 3] = s3;
      }
      for (; j < n; ++j) {
        const double* bj = b.row(j);
        double s = 0;
        for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
        ci[j] = s;
      }
    }
  });
}

namespace {

void gemm_nn_impl(const Matrix& a, const Matrix& b, Matrix* c, bool accumulate) {
  const int m = a.rows(), k = a.cols(), n = b.cols();
  TECA_CHECK(b.rows() == k, "gemm_nn: inner dimensions differ");
  TECA_CHECK(c->rows() == m && c->cols() == n, "gemm_nn: bad output shape");
  const size_t flops = 2ull * m * n * k;
  parallel_rows(m, flops, [&](int r0, int r1) {
    for (int i = r0; i < r1; ++i) {
      double* ci = c->row(i);
      if (!accumulate) {
        for (int j = 0; j < n; ++j) ci[j] = 0.0;
      }
      const double* ai = a.row(i);
      for (int p = 0; p < k; ++p) {
        const double av = ai[p];
        if (av == 0.0) continue;
        const double* bp = b.row(p);
        for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
      }
    }
  });
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix* c) {
  gemm_nn_impl(a, b, c, /*accumulate=*/false);
}

void gemm_nn_acc(const Matrix& a, const Matrix& b, Matrix* c) {
  gemm_nn_impl(a, b, c, /*accumulate=*/true);
}

void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix* c) {
  const int k = a.rows(), m = a.cols(), n = b.cols();
  TECA_CHECK(b.rows() == k, "gemm_tn: inner dimensions differ");
  TECA_CHECK(c->rows() == m && c->cols() == n, "gemm_tn: bad output shape");
  // C[i,j] += sum_p A[p,i] * B[p,j]. Threads own disjoint row ranges of C
  // and every element accumulates over p in a fixed order, so the result
  // is independent of the split.
  const size_t flops = 2ull * k * m * n;
  parallel_rows(m, flops, [&](int r0, int r1) {
    for (int p = 0; p < k; ++p) {
      const double* ap = a.row(p);
      const double* bp = b.row(p);
      for (int i = r0; i < r1; ++i) {
        const double av = ap[i];
        if (av == 0.0) continue;
        double* ci = c->row(i);
        for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
      }
    }
  });
}

}  // namespace teca
