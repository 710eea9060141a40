#include "graphdst/numerics/tensor.hpp"

#include "graphdst/errors.hpp"
#include "graphdst/numerics/params.hpp"

namespace gdst::nn {

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("item() on a " + std::to_string(rows()) + "x" + std::to_string(cols()) +
                     " tensor");
  }
  return node_->value(0, 0);
}

Tensor make_result(Matrix value, std::initializer_list<const Tensor*> inputs,
                   std::function<void(const Matrix&)> backward) {
  Tape* tape = nullptr;
  for (const Tensor* in : inputs) {
    Tape* t = in->tape();
    if (t == nullptr) continue;
    if (tape != nullptr && tape != t) throw Error("tensors recorded on different tapes");
    tape = t;
  }
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  if (tape != nullptr) {
    node->tape = tape;
    node->backward = std::move(backward);
    tape->nodes_.push_back(node);
  }
  return Tensor(std::move(node));
}

Tensor Tape::watch(Parameter& param) {
  auto node = std::make_shared<detail::Node>();
  node->value = param.value;
  node->tape = this;
  nodes_.push_back(node);
  watched_.emplace_back(&param, node);
  return Tensor(std::move(node));
}

Tensor Tape::leaf(Matrix value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  node->tape = this;
  nodes_.push_back(node);
  return Tensor(std::move(node));
}

void Tape::backward(const Tensor& loss) {
  if (!loss.tracked() || loss.tape() != this) throw Error("backward: loss is not on this tape");
  if (loss.rows() != 1 || loss.cols() != 1) throw ShapeError("backward: loss must be 1x1");
  loss.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    detail::Node& node = **it;
    if (node.grad.size() == 0 || !node.backward) continue;
    node.backward(node.grad);
  }
  for (auto& [param, node] : watched_) {
    if (node->grad.size() == 0) continue;
    if (param->grad.size() == 0) {
      param->grad = node->grad;
    } else {
      param->grad += node->grad;
    }
  }
}

}  // namespace gdst::nn
