#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace gdst::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

class Tape;
struct Parameter;

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;  // empty until a gradient flows in
  Tape* tape = nullptr;
  std::function<void(const Matrix&)> backward;

  template <typename Derived>
  void accumulate(const Eigen::MatrixBase<Derived>& g) {
    if (tape == nullptr) return;
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

}  // namespace detail

/// A 2-D array of doubles, optionally recorded on a gradient tape.
///
/// Vectors are 1 x d rows. Copies share the underlying node, so a Tensor is a
/// cheap handle; the value itself is never mutated after creation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor zeros(Index rows, Index cols) { return constant(Matrix::Zero(rows, cols)); }

  bool defined() const { return node_ != nullptr; }
  bool tracked() const { return node_ && node_->tape != nullptr; }
  Tape* tape() const { return node_ ? node_->tape : nullptr; }

  const Matrix& value() const { return node_->value; }
  /// Gradient after Tape::backward. Empty when nothing reached this tensor.
  const Matrix& grad() const { return node_->grad; }

  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  double item() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  friend class Tape;
  friend Tensor make_result(Matrix value, std::initializer_list<const Tensor*> inputs,
                            std::function<void(const Matrix&)> backward);
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;
};

/// Builds an op output. The result is recorded on the tape of its tracked
/// inputs; if no input is tracked the result is a constant and `backward` is
/// dropped.
Tensor make_result(Matrix value, std::initializer_list<const Tensor*> inputs,
                   std::function<void(const Matrix&)> backward);

/// Reverse-mode gradient tape. Confined to one thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable leaf bound to a parameter; backward() adds its gradient
  /// into `param.grad`.
  Tensor watch(Parameter& param);
  /// Differentiable leaf not bound to any parameter.
  Tensor leaf(Matrix value);

  /// Seeds d(loss)/d(loss) = 1 and propagates in reverse creation order.
  void backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend Tensor make_result(Matrix, std::initializer_list<const Tensor*>,
                            std::function<void(const Matrix&)>);

  std::vector<std::shared_ptr<detail::Node>> nodes_;
  std::vector<std::pair<Parameter*, std::shared_ptr<detail::Node>>> watched_;
};

}  // namespace gdst::nn
