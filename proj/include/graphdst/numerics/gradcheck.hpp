#pragma once

#include "graphdst/numerics/params.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gdst::nn {

struct GradCheckOptions {
  double eps = 3e-5;
  double tolerance = 1e-4;
  /// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, abs_floor).
  double abs_floor = 1e-6;
  /// Tensors larger than this are checked on a random sample of entries; 0 = all.
  std::size_t max_samples_per_tensor = 200;
  /// When the two evaluations of an entry see different ReLU sign patterns the
  /// step straddles a kink; it is divided by 4 up to this many times.
  int kink_refinements = 4;
  std::uint64_t seed = 0;
  /// Worker threads for the finite differences; 0 = one per hardware thread.
  /// The report does not depend on this value.
  std::size_t threads = 0;
};

struct TensorCheck {
  std::string name;
  ParamGroup group = ParamGroup::kEncoder;
  std::size_t checked = 0;
  /// Entries whose step had to shrink to clear a ReLU kink.
  std::size_t kinked = 0;
  double max_rel_error = 0.0;
  Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error < tolerance; }
  /// Tensors whose worst entry exceeds the tolerance, worst first.
  std::vector<TensorCheck> offenders() const;
  std::map<ParamGroup, double> group_max() const;
  std::string summary(std::size_t worst = 5) const;
};

/// The loss must be a deterministic function of the parameters reachable
/// through the binder.
using LossFn = std::function<Tensor(ParamBinder&)>;

/// `loss_fn` is called concurrently on private copies of `params` when more
/// than one thread is used, so it must only read parameters through the binder.
///
/// Compares tape gradients against central differences
/// (f(theta + eps) - f(theta - eps)) / 2 eps for every trainable tensor.
/// A step across a ReLU kink measures a one-sided mixture rather than the
/// derivative, so such entries are retried with a smaller step.
GradCheckReport check_gradients(const LossFn& loss_fn, ParamStore& params,
                                const GradCheckOptions& options = {});

}  // namespace gdst::nn
