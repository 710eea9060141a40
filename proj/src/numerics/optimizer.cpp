#include "graphdst/numerics/optimizer.hpp"

#include "graphdst/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gdst::nn {

Adam::Adam(const ParamStore& params, std::map<ParamGroup, GroupSchedule> schedules,
           std::size_t total_steps, double beta1, double beta2, double eps)
    : schedules_(std::move(schedules)),
      total_steps_(std::max<std::size_t>(total_steps, 1)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
  for (const auto& p : params) {
    if (schedules_.count(p.group) == 0) {
      throw Error("no learning-rate schedule for group '" + std::string(to_string(p.group)) + "'");
    }
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

double Adam::learning_rate(ParamGroup group, std::size_t step) const {
  const GroupSchedule& s = schedules_.at(group);
  const double total = static_cast<double>(total_steps_);
  const double warmup = s.warmup_proportion * total;
  const double t = static_cast<double>(step);
  if (warmup > 0.0 && t < warmup) return s.learning_rate * (t + 1.0) / warmup;
  const double remaining = std::max(0.0, total - t) / std::max(1.0, total - warmup);
  return s.learning_rate * remaining;
}

void Adam::step(ParamStore& params) {
  if (params.size() != m_.size()) throw Error("Adam: parameter store changed size");
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  std::size_t i = 0;
  for (auto& p : params) {
    Matrix& m = m_[i];
    Matrix& v = v_[i];
    ++i;
    if (p.grad.size() == 0) continue;
    const double lr = learning_rate(p.group, step_ - 1);
    m = beta1_ * m + (1.0 - beta1_) * p.grad;
    v = beta2_ * v + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

}  // namespace gdst::nn
