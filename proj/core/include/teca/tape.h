// core/include/teca/tape.h

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

#ifndef TECA_TAPE_H_
#define TECA_TAPE_H_

#include <span>
#include <string>
#include <vector>

#include "teca/matrix.h"

namespace teca {

// A named learnable array with its gradient buffer. Parameters live
// outside the tape (in the model) and are registered per forward pass.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;

  Param() = default;
  Param(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

// Reverse-mode tape over the handful of matrix operations the training
// pipeline needs. Build a graph with the factory methods, then call
// backward(loss) once; gradients of registered parameters accumulate into
// their Param::grad buffers.
//
// Not a general graph compiler on purpose: only the operators below exist.
class Tape {
 public:
  using Id = int;

  Id constant(Matrix v);
  Id leaf(Param* p);  // gradient flows into p->grad

  // C = A * B^T where a is (m x k) and b is (n x k).
  Id matmul_nt(Id a, Id b);
  // C = A + row vector (bias broadcast over rows); bias is 1 x n.
  Id add_row(Id a, Id bias);
  Id relu(Id a);
  Id sigmoid(Id a);
  Id softmax_rows(Id a);
  Id scale(Id a, double s);
  // Row-wise dot product of two equally shaped matrices -> (m x 1).
  Id row_dot(Id a, Id b);
  // C[i,j] = A[i,j] * w[i, col]: one weight column scales a whole block.
  Id scale_rows_by_col(Id a, Id weights, int col);
  Id concat_cols(std::span<const Id> parts);
  // Mean squared error against a constant target; yields a 1 x 1 node.
  Id mse(Id pred, const Matrix& target);
  // s = a + coeff * b over 1 x 1 nodes.
  Id add_scaled(Id a, Id b, double coeff);

  const Matrix& value(Id id) const;

  // Runs reverse-mode accumulation from a scalar node. Throws if the node
  // is not 1 x 1 or the tape is empty.
  void backward(Id loss);

  size_t num_nodes() const;

 private:
  struct Node {
    Matrix value;
    Matrix grad_buf;         // lazily sized by backward()
    Param* param = nullptr;  // set for leaves
    bool needs_grad = false;

    enum class Op {
      kConstant,
      kLeaf,
      kMatmulNt,
      kAddRow,
      kRelu,
      kSigmoid,
      kSoftmaxRows,
      kScale,
      kRowDot,
      kScaleRowsByCol,
      kConcatCols,
      kMse,
      kAddScaled,
    } op = Op::kConstant;
    std::vector<Id> inputs;
    double scalar = 0.0;  // scale factor / loss coefficient
    int col = 0;          // column index for kScaleRowsByCol
    Matrix aux;           // op-specific: mse target
  };

  Id push(Node n);
  Matrix& grad(Id id);

  std::vector<Node> nodes_;
};

}  // namespace teca

#endif  // TECA_TAPE_H_
