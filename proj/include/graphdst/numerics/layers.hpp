#pragma once

#include "graphdst/numerics/ops.hpp"

#include <vector>

namespace gdst::nn {

struct AttentionParams {
  Tensor wq, bq;
  Tensor wk, bk;
  Tensor wv, bv;
};

struct AttentionResult {
  Tensor output;                 // n x d_h, heads concatenated
  std::vector<Matrix> weights;   // one n x n row-stochastic matrix per head
};

/// Bidirectional multi-head self-attention without an output projection:
/// head_j = softmax(Q_j K_j^T / sqrt(d_k)) V_j, output = concat(head_1..head_h).
AttentionResult multi_head_attention(const Tensor& h, const AttentionParams& p, int n_heads);

/// Gates packed as [reset | update | candidate] along columns.
struct GruParams {
  Tensor w_ih;  // d_in x 3d
  Tensor w_hh;  // d x 3d
  Tensor b_ih;  // 1 x 3d
  Tensor b_hh;  // 1 x 3d
};

/// One GRU step on row vectors: returns (1 - z) * n + z * h.
Tensor gru_step(const Tensor& x, const Tensor& h, const GruParams& p);

struct FeedForwardParams {
  Tensor w1, b1;  // d x d_ff
  Tensor w2, b2;  // d_ff x d
};

/// gelu(x W1 + b1) W2 + b2, applied row-wise.
Tensor feed_forward(const Tensor& x, const FeedForwardParams& p);

/// x W + b for a row block.
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);

}  // namespace gdst::nn
