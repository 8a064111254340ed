// core/src/attention.cc

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

#include "teca/attention.h"

#include <algorithm>
#include <cmath>

#include "teca/errors.h"

namespace teca::attn {

ContextTensor expand_context(const Matrix& y, int c) {
  TECA_CHECK(c >= 1 && c % 2 == 1, "context size must be odd");
  TECA_CHECK(y.rows() >= 1, "empty feature matrix");
  ContextTensor ctx;
  ctx.t_count = y.rows();
  ctx.f_count = y.cols();
  ctx.c = c;
  ctx.slices.reserve(c);
  const int half = (c - 1) / 2;
  for (int k = 0; k < c; ++k) {
    const int offset = k - half;
    Matrix slice(y.rows(), y.cols());
    for (int t = 0; t < y.rows(); ++t) {
      const int src = std::clamp(t + offset, 0, y.rows() - 1);
      const double* s = y.row(src);
      double* d = slice.row(t);
      for (int f = 0; f < y.cols(); ++f) d[f] = s[f];
    }
    ctx.slices.push_back(std::move(slice));
  }
  return ctx;
}

SubbandPartition partition_bands(int f_count, int n_bands) {
  TECA_CHECK(n_bands >= 1, "need at least one band");
  TECA_CHECK(n_bands <= f_count,
             "more bands (" << n_bands << ") than bins (" << f_count << ")");
  SubbandPartition part;
  part.n_bands = n_bands;
  part.edges.resize(n_bands + 1);
  const int base = f_count / n_bands;
  const int remainder = f_count % n_bands;
  part.edges[0] = 0;
  for (int b = 0; b < n_bands; ++b) {
    part.edges[b + 1] = part.edges[b] + base + (b < remainder ? 1 : 0);
  }
  return part;
}

AttentionParams init_attention_params(int width, int d_q, int d_v, Rng* rng) {
  TECA_CHECK(width >= 1 && d_q >= 1 && d_v >= 1, "bad attention dimensions");
  auto xavier = [&](int rows, int cols) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / (rows + cols));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = rng->uniform(-bound, bound);
    }
    return m;
  };
  AttentionParams p;
  p.wq = xavier(d_q, width);
  p.wk = xavier(d_q, width);
  p.wv = xavier(d_v, width);
  return p;
}

AttentionGraph attention_band_graph(Tape* tape,
                                    std::span<const Tape::Id> ctx_slices,
                                    Tape::Id center, Tape::Id wq, Tape::Id wk,
                                    Tape::Id wv) {
  const int c = static_cast<int>(ctx_slices.size());
  TECA_CHECK(c >= 1, "attention needs at least one context slice");
  const int width = tape->value(center).cols();
  TECA_CHECK(tape->value(wq).cols() == width &&
                 tape->value(wk).cols() == width &&
                 tape->value(wv).cols() == width,
             "dimension mismatch between projections and features");
  TECA_CHECK(tape->value(wq).rows() == tape->value(wk).rows(),
             "dimension mismatch between query and key projections");
  for (Tape::Id s : ctx_slices) {
    TECA_CHECK(tape->value(s).cols() == width &&
                   tape->value(s).rows() == tape->value(center).rows(),
               "dimension mismatch in context slices");
  }
  const int d_q = tape->value(wq).rows();

  const Tape::Id key = tape->matmul_nt(center, wk);  // T x d_q

  std::vector<Tape::Id> scores;
  std::vector<Tape::Id> values;
  scores.reserve(c);
  values.reserve(c);
  for (Tape::Id s : ctx_slices) {
    const Tape::Id query = tape->matmul_nt(s, wq);  // T x d_q
    scores.push_back(tape->row_dot(query, key));    // T x 1
    values.push_back(tape->matmul_nt(s, wv));       // T x d_v
  }
  Tape::Id logits = tape->concat_cols(scores);                // T x c
  logits = tape->scale(logits, 1.0 / std::sqrt(static_cast<double>(d_q)));
  const Tape::Id weights = tape->softmax_rows(logits);

  std::vector<Tape::Id> blocks;
  blocks.reserve(c);
  for (int k = 0; k < c; ++k) {
    blocks.push_back(tape->scale_rows_by_col(values[k], weights, k));
  }
  AttentionGraph out;
  out.weighted = tape->concat_cols(blocks);  // T x (d_v * c), context-major
  out.weights = weights;
  return out;
}

namespace {

AttentionOutput run_banded(const ContextTensor& ctx, const Matrix& y,
                           std::span<const AttentionParams> params,
                           const SubbandPartition& part) {
  TECA_CHECK(ctx.t_count == y.rows() && ctx.f_count == y.cols(),
             "dimension mismatch between context and features");
  TECA_CHECK(static_cast<int>(params.size()) == part.n_bands,
             "one parameter set per band required");
  TECA_CHECK(part.edges.back() == y.cols(),
             "partition does not cover the feature bins");

  Tape tape;
  std::vector<Tape::Id> weighted_parts;
  std::vector<Tape::Id> weight_parts;
  for (int b = 0; b < part.n_bands; ++b) {
    const int f0 = part.band_begin(b), f1 = part.band_end(b);
    TECA_CHECK(params[b].width() == f1 - f0,
               "band " << b << " parameters expect width "
                       << params[b].width() << ", band has " << f1 - f0);
    std::vector<Tape::Id> slices;
    slices.reserve(ctx.c);
    const bool full = f0 == 0 && f1 == y.cols();
    for (int k = 0; k < ctx.c; ++k) {
      slices.push_back(tape.constant(full ? ctx.slices[k]
                                          : ctx.slices[k].col_range(f0, f1)));
    }
    const Tape::Id center =
        tape.constant(full ? y : y.col_range(f0, f1));
    const Tape::Id wq = tape.constant(params[b].wq);
    const Tape::Id wk = tape.constant(params[b].wk);
    const Tape::Id wv = tape.constant(params[b].wv);
    AttentionGraph g = attention_band_graph(&tape, slices, center, wq, wk, wv);
    weighted_parts.push_back(g.weighted);
    weight_parts.push_back(g.weights);
  }
  AttentionOutput out;
  out.weighted = tape.value(tape.concat_cols(weighted_parts));
  out.weights = tape.value(tape.concat_cols(weight_parts));
  return out;
}

}  // namespace

AttentionOutput fta_forward(const ContextTensor& ctx, const Matrix& y,
                            const AttentionParams& params) {
  SubbandPartition full;
  full.n_bands = 1;
  full.edges = {0, y.cols()};
  return run_banded(ctx, y, std::span<const AttentionParams>(&params, 1),
                    full);
}

AttentionOutput sta_forward(const ContextTensor& ctx, const Matrix& y,
                            std::span<const AttentionParams> params,
                            const SubbandPartition& part) {
  return run_banded(ctx, y, params, part);
}

}  // namespace teca::attn
