#pragma once

#include "graphdst/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace gdst::testsupport {

inline nn::Matrix random_matrix(nn::Index rows, nn::Index cols, std::mt19937_64& rng,
                                double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  nn::Matrix m(rows, cols);
  for (nn::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

/// Independent finite-difference oracle for a function of several matrices.
///
/// `fn` maps input tensors to an output tensor. The scalar under test is
/// sum(out .* weights) with fixed random weights, so every output entry
/// contributes with a different coefficient. Returns the largest relative
/// error between tape gradients and central differences over all inputs.
inline double op_gradient_error(
    const std::function<nn::Tensor(const std::vector<nn::Tensor>&)>& fn,
    std::vector<nn::Matrix> inputs, std::uint64_t seed = 1, double eps = 1e-6) {
  std::mt19937_64 rng(seed);
  nn::Matrix weights;
  {
    std::vector<nn::Tensor> consts;
    for (const auto& m : inputs) consts.push_back(nn::Tensor::constant(m));
    const nn::Matrix out = fn(consts).value();
    weights = random_matrix(out.rows(), out.cols(), rng);
  }
  auto scalar = [&](const std::vector<nn::Matrix>& xs) {
    std::vector<nn::Tensor> consts;
    for (const auto& m : xs) consts.push_back(nn::Tensor::constant(m));
    return fn(consts).value().cwiseProduct(weights).sum();
  };

  nn::Tape tape;
  std::vector<nn::Tensor> leaves;
  for (const auto& m : inputs) leaves.push_back(tape.leaf(m));
  nn::Tensor out = fn(leaves);
  tape.backward(nn::sum(nn::mul(out, nn::Tensor::constant(weights))));

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const nn::Matrix& g = leaves[k].grad();
    for (nn::Index i = 0; i < inputs[k].size(); ++i) {
      const double saved = inputs[k].data()[i];
      inputs[k].data()[i] = saved + eps;
      const double up = scalar(inputs);
      inputs[k].data()[i] = saved - eps;
      const double down = scalar(inputs);
      inputs[k].data()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = g.size() == 0 ? 0.0 : g.data()[i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-7});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace gdst::testsupport
