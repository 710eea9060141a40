#pragma once

#include "graphdst/numerics/tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gdst::nn {

// Linear algebra.
Tensor matmul(const Tensor& a, const Tensor& b);
/// a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);

// Elementwise, same shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor one_minus(const Tensor& a);

/// a (r x c) + row (1 x c) broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);
/// a (r x c) - row (1 x c) broadcast over rows.
Tensor sub_row(const Tensor& a, const Tensor& row);
/// Row i of a (r x c) scaled by col(i, 0); col is r x 1.
Tensor scale_rows(const Tensor& a, const Tensor& col);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);

/// While alive, relu() calls on this thread fold the sign pattern of their
/// inputs into hash(). Two evaluations with different hashes lie on opposite
/// sides of a kink.
class ReluPatternScope {
 public:
  ReluPatternScope();
  ~ReluPatternScope();
  ReluPatternScope(const ReluPatternScope&) = delete;
  ReluPatternScope& operator=(const ReluPatternScope&) = delete;

  std::uint64_t hash() const { return hash_; }

 private:
  friend Tensor relu(const Tensor& a);
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  ReluPatternScope* outer_;
};
/// Exact (erf) GELU.
Tensor gelu(const Tensor& a);
Tensor log(const Tensor& a);

/// Sum of all entries, 1 x 1.
Tensor sum(const Tensor& a);
/// Entry (r, c) as a 1 x 1 tensor.
Tensor pick(const Tensor& a, Index r, Index c);

/// Row-wise softmax. When `allowed` is non-empty it has one flag per column;
/// disallowed columns get probability exactly 0.
Tensor softmax_rows(const Tensor& a, std::span<const std::uint8_t> allowed = {});
/// Sum over rows of -log softmax(a)[row, targets[row]], as 1 x 1.
Tensor cross_entropy_rows(const Tensor& logits, std::span<const Index> targets);

/// Per-row normalisation to zero mean / unit variance, then gain * x + bias.
Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias, double eps = 1e-12);

Tensor gather_rows(const Tensor& a, std::span<const Index> rows);
/// Copy of a with rows[i] replaced by replacement row i.
Tensor scatter_rows(const Tensor& a, std::span<const Index> rows, const Tensor& replacement);
/// out (r x width), out(:, ids[k]) += a(:, k). Columns sharing an id are summed.
Tensor scatter_add_cols(const Tensor& a, std::span<const Index> ids, Index width);

Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor& a, Index start, Index count);
Tensor slice_rows(const Tensor& a, Index start, Index count);

/// Inverted dropout; identity when rate == 0.
Tensor dropout(const Tensor& a, double rate, std::mt19937_64& rng);

namespace testing {

/// Backward rules that can be deliberately broken to exercise the gradient
/// checker. Process-wide; tests only.
enum class Fault : std::uint8_t { kNone, kSigmoid, kLayerNorm, kSoftmax, kTanh, kGelu, kRelu };

void inject_backward_fault(Fault fault);
Fault injected_backward_fault();

}  // namespace testing

}  // namespace gdst::nn
