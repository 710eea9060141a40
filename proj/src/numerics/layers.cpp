#include "graphdst/numerics/layers.hpp"

#include "graphdst/errors.hpp"

#include <cmath>
#include <string>

namespace gdst::nn {

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) { return add_row(matmul(x, w), b); }

AttentionResult multi_head_attention(const Tensor& h, const AttentionParams& p, int n_heads) {
  const Index d = h.cols();
  if (n_heads <= 0 || d % n_heads != 0) {
    throw ShapeError("multi_head_attention: d_h=" + std::to_string(d) +
                     " not divisible by n_heads=" + std::to_string(n_heads));
  }
  if (h.rows() < 1) throw ShapeError("multi_head_attention: empty sequence");
  if (p.wq.rows() != d || p.wq.cols() != d || p.wk.rows() != d || p.wk.cols() != d ||
      p.wv.rows() != d || p.wv.cols() != d) {
    throw ShapeError("multi_head_attention: projection weights must be d_h x d_h");
  }
  const Index dk = d / n_heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = affine(h, p.wq, p.bq);
  Tensor k = affine(h, p.wk, p.bk);
  Tensor v = affine(h, p.wv, p.bv);

  AttentionResult result;
  std::vector<Tensor> heads;
  heads.reserve(static_cast<std::size_t>(n_heads));
  for (int j = 0; j < n_heads; ++j) {
    Tensor qj = slice_cols(q, j * dk, dk);
    Tensor kj = slice_cols(k, j * dk, dk);
    Tensor vj = slice_cols(v, j * dk, dk);
    Tensor attn = softmax_rows(scale(matmul_nt(qj, kj), inv_sqrt_dk));
    result.weights.push_back(attn.value());
    heads.push_back(matmul(attn, vj));
  }
  result.output = n_heads == 1 ? heads[0] : concat_cols(heads);
  return result;
}

Tensor gru_step(const Tensor& x, const Tensor& h, const GruParams& p) {
  const Index d = h.cols();
  if (x.rows() != 1 || h.rows() != 1) throw ShapeError("gru_step: inputs must be row vectors");
  if (p.w_ih.rows() != x.cols() || p.w_ih.cols() != 3 * d || p.w_hh.rows() != d ||
      p.w_hh.cols() != 3 * d) {
    throw ShapeError("gru_step: weight shapes do not match input/state dimensions");
  }
  Tensor gi = affine(x, p.w_ih, p.b_ih);
  Tensor gh = affine(h, p.w_hh, p.b_hh);
  Tensor r = sigmoid(add(slice_cols(gi, 0, d), slice_cols(gh, 0, d)));
  Tensor z = sigmoid(add(slice_cols(gi, d, d), slice_cols(gh, d, d)));
  Tensor n = tanh(add(slice_cols(gi, 2 * d, d), mul(r, slice_cols(gh, 2 * d, d))));
  return add(mul(one_minus(z), n), mul(z, h));
}

Tensor feed_forward(const Tensor& x, const FeedForwardParams& p) {
  return affine(gelu(affine(x, p.w1, p.b1)), p.w2, p.b2);
}

}  // namespace gdst::nn
