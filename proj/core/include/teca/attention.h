// core/include/teca/attention.h

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

#ifndef TECA_ATTENTION_H_
#define TECA_ATTENTION_H_

#include <span>
#include <vector>

#include "teca/matrix.h"
#include "teca/rng.h"
#include "teca/tape.h"

namespace teca::attn {

// Frame-context expansion of a T x F feature matrix: slices[k] holds the
// frame at context offset k - (c-1)/2 for every row, with first/last
// frame replication past the edges. The offset-0 slice is the input.
struct ContextTensor {
  int t_count = 0;
  int f_count = 0;
  int c = 0;
  std::vector<Matrix> slices;  // c entries, each T x F

  int half() const { return (c - 1) / 2; }
  double value(int t, int f, int k) const { return slices[k](t, f); }
};

// Query/key/value projections for one attention block. For subband
// attention each band owns an independent set.
struct AttentionParams {
  Matrix wq;  // d_q x F
  Matrix wk;  // d_q x F
  Matrix wv;  // d_v x F

  int d_q() const { return wq.rows(); }
  int d_v() const { return wv.rows(); }
  int width() const { return wq.cols(); }
};

// Contiguous frequency bands covering [0, F): N+1 edges, widths differing
// by at most one bin, the remainder going to the lowest bands.
struct SubbandPartition {
  int n_bands = 1;
  std::vector<int> edges;  // n_bands + 1 entries

  int band_begin(int b) const { return edges[b]; }
  int band_end(int b) const { return edges[b + 1]; }
  int band_width(int b) const { return edges[b + 1] - edges[b]; }
};

struct AttentionOutput {
  // T x (sum_b d_v_b * c); per band, context-major blocks of d_v values.
  Matrix weighted;
  // T x (N * c); each c-wide row block is a softmax distribution.
  Matrix weights;
};

ContextTensor expand_context(const Matrix& y, int c);

SubbandPartition partition_bands(int f_count, int n_bands);

// Xavier-uniform initialized projections for a band of width `width`.
AttentionParams init_attention_params(int width, int d_q, int d_v, Rng* rng);

// Fullband temporal attention: per frame i, Q(i) = Wq C(i),
// K(i) = Wk Y(i), A(i) = softmax(Q(i)^T K(i) / sqrt(d_q)),
// Y'(i) = V(i) * A(i) broadcast over the d_v rows of V(i) = Wv C(i).
AttentionOutput fta_forward(const ContextTensor& ctx, const Matrix& y,
                            const AttentionParams& params);

// Subband temporal attention: fta_forward per band on the band-sliced
// features, outputs concatenated in ascending band order.
AttentionOutput sta_forward(const ContextTensor& ctx, const Matrix& y,
                            std::span<const AttentionParams> params,
                            const SubbandPartition& part);

// Tape-graph builder shared by the pure transforms above, the trainer and
// inference: one attention band over pre-sliced context/center nodes.
struct AttentionGraph {
  Tape::Id weighted;
  Tape::Id weights;
};
AttentionGraph attention_band_graph(Tape* tape,
                                    std::span<const Tape::Id> ctx_slices,
                                    Tape::Id center, Tape::Id wq, Tape::Id wk,
                                    Tape::Id wv);

}  // namespace teca::attn

#endif  // TECA_ATTENTION_H_
