// core/include/teca/matrix.h

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

#ifndef TECA_MATRIX_H_
#define TECA_MATRIX_H_

#include <cstddef>
#include <vector>

namespace teca {

// Dense row-major double matrix. Frames are rows throughout the library:
// a T x F feature matrix holds one spectral frame per row.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& operator()(int r, int c) {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double* row(int r) const {
    return data_.data() + static_cast<size_t>(r) * cols_;
  }

  void fill(double v) { data_.assign(data_.size(), v); }
  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool all_finite() const;

  // Column slice [c0, c1) as a new matrix.
  Matrix col_range(int c0, int c1) const;

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

// C = A * B^T.  A is (m x k), B is (n x k), C is (m x n).
// This is the natural orientation for "batch rows times weight rows".
void gemm_nt(const Matrix& a, const Matrix& b, Matrix* c);

// C = A * B.  A is (m x k), B is (k x n), C is (m x n).
void gemm_nn(const Matrix& a, const Matrix& b, Matrix* c);

// C += A^T * B.  A is (k x m), B is (k x n), C is (m x n).
// Accumulating form used for weight gradients.
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix* c);

// C += A * B (accumulating).
void gemm_nn_acc(const Matrix& a, const Matrix& b, Matrix* c);

}  // namespace teca

#endif  // TECA_MATRIX_H_
