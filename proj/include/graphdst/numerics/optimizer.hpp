#pragma once

#include "graphdst/numerics/params.hpp"

#include <map>
#include <vector>

namespace gdst::nn {

struct GroupSchedule {
  double learning_rate = 1e-3;
  double warmup_proportion = 0.0;
};

/// Adam with bias correction and a per-group linear warmup followed by
/// linear decay to zero at `total_steps`.
class Adam {
 public:
  Adam(const ParamStore& params, std::map<ParamGroup, GroupSchedule> schedules,
       std::size_t total_steps, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Applies one update from the gradients currently held in `params`.
  void step(ParamStore& params);

  double learning_rate(ParamGroup group, std::size_t step) const;
  std::size_t steps_taken() const { return step_; }

 private:
  std::map<ParamGroup, GroupSchedule> schedules_;
  std::size_t total_steps_;
  double beta1_, beta2_, eps_;
  std::size_t step_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace gdst::nn
