// core/src/tape.cc

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

#include "teca/tape.h"

#include <cmath>

#include "teca/errors.h"

namespace teca {

const Matrix& Tape::value(Id id) const { return nodes_[id].value; }

size_t Tape::num_nodes() const { return nodes_.size(); }

Tape::Id Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Matrix& Tape::grad(Id id) {
  Node& n = nodes_[id];
  if (n.grad_buf.rows() != n.value.rows() ||
      n.grad_buf.cols() != n.value.cols()) {
    n.grad_buf = Matrix(n.value.rows(), n.value.cols());
  }
  return n.grad_buf;
}

Tape::Id Tape::constant(Matrix v) {
  Node n;
  n.value = std::move(v);
  n.op = Node::Op::kConstant;
  return push(std::move(n));
}

Tape::Id Tape::leaf(Param* p) {
  Node n;
  n.value = p->value;
  n.param = p;
  n.needs_grad = true;
  n.op = Node::Op::kLeaf;
  return push(std::move(n));
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  Node n;
  n.op = Node::Op::kMatmulNt;
  n.inputs = {a, b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = Matrix(av.rows(), bv.rows());
  gemm_nt(av, bv, &n.value);
  return push(std::move(n));
}

Tape::Id Tape::add_row(Id a, Id bias) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[bias].value;
  TECA_CHECK(bv.rows() == 1 && bv.cols() == av.cols(),
             "add_row: bias must be 1 x cols");
  Node n;
  n.op = Node::Op::kAddRow;
  n.inputs = {a, bias};
  n.needs_grad = nodes_[a].needs_grad || nodes_[bias].needs_grad;
  n.value = av;
  for (int r = 0; r < av.rows(); ++r) {
    double* row = n.value.row(r);
    for (int c = 0; c < av.cols(); ++c) row[c] += bv(0, c);
  }
  return push(std::move(n));
}

Tape::Id Tape::relu(Id a) {
  Node n;
  n.op = Node::Op::kRelu;
  n.inputs = {a};
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value;
  for (int r = 0; r < n.value.rows(); ++r) {
    double* row = n.value.row(r);
    for (int c = 0; c < n.value.cols(); ++c) row[c] = std::max(row[c], 0.0);
  }
  return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id a) {
  Node n;
  n.op = Node::Op::kSigmoid;
  n.inputs = {a};
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value;
  for (int r = 0; r < n.value.rows(); ++r) {
    double* row = n.value.row(r);
    for (int c = 0; c < n.value.cols(); ++c) {
      row[c] = 1.0 / (1.0 + std::exp(-row[c]));
    }
  }
  return push(std::move(n));
}

Tape::Id Tape::softmax_rows(Id a) {
  Node n;
  n.op = Node::Op::kSoftmaxRows;
  n.inputs = {a};
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value;
  for (int r = 0; r < n.value.rows(); ++r) {
    double* row = n.value.row(r);
    double mx = row[0];
    for (int c = 1; c < n.value.cols(); ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    for (int c = 0; c < n.value.cols(); ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    const double inv = 1.0 / sum;
    for (int c = 0; c < n.value.cols(); ++c) row[c] *= inv;
  }
  return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double s) {
  Node n;
  n.op = Node::Op::kScale;
  n.inputs = {a};
  n.scalar = s;
  n.needs_grad = nodes_[a].needs_grad;
  n.value = nodes_[a].value;
  for (int r = 0; r < n.value.rows(); ++r) {
    double* row = n.value.row(r);
    for (int c = 0; c < n.value.cols(); ++c) row[c] *= s;
  }
  return push(std::move(n));
}

Tape::Id Tape::row_dot(Id a, Id b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  TECA_CHECK(av.same_shape(bv), "row_dot: shape mismatch");
  Node n;
  n.op = Node::Op::kRowDot;
  n.inputs = {a, b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = Matrix(av.rows(), 1);
  for (int r = 0; r < av.rows(); ++r) {
    const double* ar = av.row(r);
    const double* br = bv.row(r);
    double s = 0.0;
    for (int c = 0; c < av.cols(); ++c) s += ar[c] * br[c];
    n.value(r, 0) = s;
  }
  return push(std::move(n));
}

Tape::Id Tape::scale_rows_by_col(Id a, Id weights, int col) {
  const Matrix& av = nodes_[a].value;
  const Matrix& wv = nodes_[weights].value;
  TECA_CHECK(wv.rows() == av.rows() && col >= 0 && col < wv.cols(),
             "scale_rows_by_col: bad weight column");
  Node n;
  n.op = Node::Op::kScaleRowsByCol;
  n.inputs = {a, weights};
  n.col = col;
  n.needs_grad = nodes_[a].needs_grad || nodes_[weights].needs_grad;
  n.value = av;
  for (int r = 0; r < av.rows(); ++r) {
    const double w = wv(r, col);
    double* row = n.value.row(r);
    for (int c = 0; c < av.cols(); ++c) row[c] *= w;
  }
  return push(std::move(n));
}

Tape::Id Tape::concat_cols(std::span<const Id> parts) {
  TECA_CHECK(!parts.empty(), "concat_cols: no inputs");
  int rows = nodes_[parts[0]].value.rows();
  int cols = 0;
  bool needs = false;
  for (Id p : parts) {
    TECA_CHECK(nodes_[p].value.rows() == rows, "concat_cols: row mismatch");
    cols += nodes_[p].value.cols();
    needs = needs || nodes_[p].needs_grad;
  }
  Node n;
  n.op = Node::Op::kConcatCols;
  n.inputs.assign(parts.begin(), parts.end());
  n.needs_grad = needs;
  n.value = Matrix(rows, cols);
  int at = 0;
  for (Id p : parts) {
    const Matrix& pv = nodes_[p].value;
    for (int r = 0; r < rows; ++r) {
      const double* src = pv.row(r);
      double* dst = n.value.row(r) + at;
      for (int c = 0; c < pv.cols(); ++c) dst[c] = src[c];
    }
    at += pv.cols();
  }
  return push(std::move(n));
}

Tape::Id Tape::mse(Id pred, const Matrix& target) {
  const Matrix& pv = nodes_[pred].value;
  TECA_CHECK(pv.same_shape(target), "mse: shape mismatch");
  Node n;
  n.op = Node::Op::kMse;
  n.inputs = {pred};
  n.needs_grad = nodes_[pred].needs_grad;
  n.aux = target;
  double acc = 0.0;
  for (int r = 0; r < pv.rows(); ++r) {
    const double* pr = pv.row(r);
    const double* tr = target.row(r);
    for (int c = 0; c < pv.cols(); ++c) {
      const double d = pr[c] - tr[c];
      acc += d * d;
    }
  }
  n.value = Matrix(1, 1);
  n.value(0, 0) = acc / (static_cast<double>(pv.rows()) * pv.cols());
  return push(std::move(n));
}

Tape::Id Tape::add_scaled(Id a, Id b, double coeff) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  TECA_CHECK(av.same_shape(bv), "add_scaled: shape mismatch");
  Node n;
  n.op = Node::Op::kAddScaled;
  n.inputs = {a, b};
  n.scalar = coeff;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.value = av;
  for (int r = 0; r < av.rows(); ++r) {
    double* row = n.value.row(r);
    const double* br = bv.row(r);
    for (int c = 0; c < av.cols(); ++c) row[c] += coeff * br[c];
  }
  return push(std::move(n));
}

void Tape::backward(Id loss) {
  TECA_CHECK(!nodes_.empty(), "backward before forward");
  TECA_CHECK(loss >= 0 && loss < static_cast<Id>(nodes_.size()),
             "backward: bad node id");
  TECA_CHECK(nodes_[loss].value.rows() == 1 && nodes_[loss].value.cols() == 1,
             "backward: loss must be scalar");

  grad(loss)(0, 0) = 1.0;

  for (Id id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad) continue;
    if (n.grad_buf.size() == 0) continue;  // no gradient reached this node
    const Matrix& g = n.grad_buf;

    switch (n.op) {
      case Node::Op::kConstant:
        break;
      case Node::Op::kLeaf:
        for (int r = 0; r < g.rows(); ++r) {
          const double* gr = g.row(r);
          double* pr = n.param->grad.row(r);
          for (int c = 0; c < g.cols(); ++c) pr[c] += gr[c];
        }
        break;
      case Node::Op::kMatmulNt: {
        Node& na = nodes_[n.inputs[0]];
        Node& nb = nodes_[n.inputs[1]];
        if (na.needs_grad) {
          // dA += dC * B
          gemm_nn_acc(g, nb.value, &grad(n.inputs[0]));
        }
        if (nb.needs_grad) {
          // dB += dC^T * A
          gemm_tn_acc(g, na.value, &grad(n.inputs[1]));
        }
        break;
      }
      case Node::Op::kAddRow: {
        Node& na = nodes_[n.inputs[0]];
        Node& nb = nodes_[n.inputs[1]];
        if (na.needs_grad) {
          Matrix& ga = grad(n.inputs[0]);
          for (int r = 0; r < g.rows(); ++r) {
            const double* gr = g.row(r);
            double* ar = ga.row(r);
            for (int c = 0; c < g.cols(); ++c) ar[c] += gr[c];
          }
        }
        if (nb.needs_grad) {
          Matrix& gb = grad(n.inputs[1]);
          for (int r = 0; r < g.rows(); ++r) {
            const double* gr = g.row(r);
            for (int c = 0; c < g.cols(); ++c) gb(0, c) += gr[c];
          }
        }
        break;
      }
      case Node::Op::kRelu: {
        Matrix& ga = grad(n.inputs[0]);
        const Matrix& x = nodes_[n.inputs[0]].value;
        for (int r = 0; r < g.rows(); ++r) {
          const double* gr = g.row(r);
          const double* xr = x.row(r);
          double* ar = ga.row(r);
          for (int c = 0; c < g.cols(); ++c) {
            if (xr[c] > 0.0) ar[c] += gr[c];
          }
        }
        break;
      }
      case Node::Op::kSigmoid: {
        Matrix& ga = grad(n.inputs[0]);
        for (int r = 0; r < g.rows(); ++r) {
          const double* gr = g.row(r);
          const double* sr = n.value.row(r);
          double* ar = ga.row(r);
          for (int c = 0; c < g.cols(); ++c) {
            ar[c] += gr[c] * sr[c] * (1.0 - sr[c]);
          }
        }
        break;
      }
      case Node::Op::kSoftmaxRows: {
        // dS = A .* (dA - rowsum(dA .* A))
        Matrix& ga = grad(n.inputs[0]);
        for (int r = 0; r < g.rows(); ++r) {
          const double* gr = g.row(r);
          const double* ar = n.value.row(r);
          double dot = 0.0;
          for (int c = 0; c < g.cols(); ++c) dot += gr[c] * ar[c];
          double* out = ga.row(r);
          for (int c = 0; c < g.cols(); ++c) {
            out[c] += ar[c] * (gr[c] - dot);
          }
        }
        break;
      }
      case Node::Op::kScale: {
        Matrix& ga = grad(n.inputs[0]);
        for (int r = 0; r < g.rows(); ++r) {
          const double* gr = g.row(r);
          double* ar = ga.row(r);
          for (int c = 0; c < g.cols(); ++c) ar[c] += n.scalar * gr[c];
        }
        break;
      }
      case Node::Op::kRowDot: {
        Node& na = nodes_[n.inputs[0]];
        Node& nb = nodes_[n.inputs[1]];
        if (na.needs_grad) {
          Matrix& ga = grad(n.inputs[0]);
          for (int r = 0; r < ga.rows(); ++r) {
            const double gs = g(r, 0);
            const double* br = nb.value.row(r);
            double* ar = ga.row(r);
            for (int c = 0; c < ga.cols(); ++c) ar[c] += gs * br[c];
          }
        }
        if (nb.needs_grad) {
          Matrix& gb = grad(n.inputs[1]);
          for (int r = 0; r < gb.rows(); ++r) {
            const double gs = g(r, 0);
            const double* ar = na.value.row(r);
            double* br = gb.row(r);
            for (int c = 0; c < gb.cols(); ++c) br[c] += gs * ar[c];
          }
        }
        break;
      }
      case Node::Op::kScaleRowsByCol: {
        Node& na = nodes_[n.inputs[0]];
        Node& nw = nodes_[n.inputs[1]];
        if (na.needs_grad) {
          Matrix& ga = grad(n.inputs[0]);
          for (int r = 0; r < g.rows(); ++r) {
            const double w = nw.value(r, n.col);
            const double* gr = g.row(r);
            double* ar = ga.row(r);
            for (int c = 0; c < g.cols(); ++c) ar[c] += w * gr[c];
          }
        }
        if (nw.needs_grad) {
          Matrix& gw = grad(n.inputs[1]);
          for (int r = 0; r < g.rows(); ++r) {
            const double* gr = g.row(r);
            const double* ar = na.value.row(r);
            double s = 0.0;
            for (int c = 0; c < g.cols(); ++c) s += gr[c] * ar[c];
            gw(r, n.col) += s;
          }
        }
        break;
      }
      case Node::Op::kConcatCols: {
        int at = 0;
        for (Id p : n.inputs) {
          Node& np = nodes_[p];
          const int w = np.value.cols();
          if (np.needs_grad) {
            Matrix& gp = grad(p);
            for (int r = 0; r < g.rows(); ++r) {
              const double* gr = g.row(r) + at;
              double* pr = gp.row(r);
              for (int c = 0; c < w; ++c) pr[c] += gr[c];
            }
          }
          at += w;
        }
        break;
      }
      case Node::Op::kMse: {
        Matrix& gp = grad(n.inputs[0]);
        const Matrix& pv = nodes_[n.inputs[0]].value;
        const double coeff =
            2.0 * g(0, 0) / (static_cast<double>(pv.rows()) * pv.cols());
        for (int r = 0; r < pv.rows(); ++r) {
          const double* pr = pv.row(r);
          const double* tr = n.aux.row(r);
          double* gr = gp.row(r);
          for (int c = 0; c < pv.cols(); ++c) {
            gr[c] += coeff * (pr[c] - tr[c]);
          }
        }
        break;
      }
      case Node::Op::kAddScaled: {
        if (nodes_[n.inputs[0]].needs_grad) {
          Matrix& ga = grad(n.inputs[0]);
          for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c < g.cols(); ++c) ga(r, c) += g(r, c);
          }
        }
        if (nodes_[n.inputs[1]].needs_grad) {
          Matrix& gb = grad(n.inputs[1]);
          for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c < g.cols(); ++c) gb(r, c) += n.scalar * g(r, c);
          }
        }
        break;
      }
    }
  }
}

}  // namespace teca
