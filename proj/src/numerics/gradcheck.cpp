#include "graphdst/numerics/gradcheck.hpp"

#include "graphdst/errors.hpp"
#include "graphdst/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

namespace gdst::nn {

std::vector<TensorCheck> GradCheckReport::offenders() const {
  std::vector<TensorCheck> out;
  for (const auto& t : tensors) {
    if (!(t.max_rel_error < tolerance)) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const TensorCheck& a, const TensorCheck& b) {
    return a.max_rel_error > b.max_rel_error;
  });
  return out;
}

std::map<ParamGroup, double> GradCheckReport::group_max() const {
  std::map<ParamGroup, double> out;
  for (const auto& t : tensors) out[t.group] = std::max(out[t.group], t.max_rel_error);
  return out;
}

std::string GradCheckReport::summary(std::size_t worst) const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific;
  std::size_t checked = 0;
  std::size_t kinked = 0;
  for (const auto& t : tensors) {
    checked += t.checked;
    kinked += t.kinked;
  }
  os << "gradient check: " << tensors.size() << " tensors, " << checked << " entries ("
     << kinked << " near a kink), max rel error " << max_rel_error << " (tolerance " << tolerance << ") -> "
     << (passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& [group, err] : group_max()) {
    os << "  group " << to_string(group) << ": max rel error " << err << "\n";
  }
  auto bad = offenders();
  if (!bad.empty()) {
    os << "  offenders:\n";
    for (std::size_t i = 0; i < std::min(worst, bad.size()); ++i) {
      const auto& t = bad[i];
      os << "    " << t.name << " [" << t.worst_index << "] analytic " << t.analytic << " numeric "
         << t.numeric << " rel " << t.max_rel_error << "\n";
    }
  }
  return os.str();
}

GradCheckReport check_gradients(const LossFn& loss_fn, ParamStore& params,
                                const GradCheckOptions& options) {
  if (!(options.eps > 0.0)) throw Error("check_gradients: eps must be positive");

  params.zero_grad();
  {
    Tape tape;
    ParamBinder binder(params, tape);
    Tensor loss = loss_fn(binder);
    tape.backward(loss);
  }

  // Sample entries up front so the result does not depend on the thread count.
  struct Probe {
    ParamId param;
    Index index;
    double numeric = 0.0;
    bool kinked = false;
  };
  std::mt19937_64 rng(options.seed);
  std::vector<Probe> probes;
  for (ParamId id = 0; id < params.size(); ++id) {
    const auto n = static_cast<std::size_t>(params[id].value.size());
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index{0});
    if (options.max_samples_per_tensor != 0 && n > options.max_samples_per_tensor) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(options.max_samples_per_tensor);
      std::sort(idx.begin(), idx.end());
    }
    for (Index i : idx) probes.push_back({id, i});
  }

  // Each worker perturbs its own copy of the parameters.
  auto work = [&](std::size_t first, std::size_t stride) {
    ParamStore local = params;
    for (std::size_t k = first; k < probes.size(); k += stride) {
      double& theta = local[probes[k].param].value.data()[probes[k].index];
      const double saved = theta;
      auto eval = [&](double at, std::uint64_t& pattern) {
        theta = at;
        ReluPatternScope scope;
        ParamBinder binder(std::as_const(local));
        const double value = loss_fn(binder).item();
        pattern = scope.hash();
        return value;
      };
      double h = options.eps;
      for (int attempt = 0;; ++attempt) {
        std::uint64_t up_pattern = 0;
        std::uint64_t down_pattern = 0;
        const double up = eval(saved + h, up_pattern);
        const double down = eval(saved - h, down_pattern);
        probes[k].numeric = (up - down) / (2.0 * h);
        if (up_pattern == down_pattern || attempt >= options.kink_refinements) break;
        probes[k].kinked = true;
        h /= 4.0;
      }
      theta = saved;
    }
  };
  std::size_t workers = options.threads != 0 ? options.threads
                                              : std::max(1u, std::thread::hardware_concurrency());
  workers = std::max<std::size_t>(1, std::min(workers, probes.size()));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  GradCheckReport report;
  report.tolerance = options.tolerance;
  std::size_t k = 0;
  for (ParamId id = 0; id < params.size(); ++id) {
    const Parameter& p = params[id];
    TensorCheck tc;
    tc.name = p.name;
    tc.group = p.group;
    for (; k < probes.size() && probes[k].param == id; ++k) {
      const Index i = probes[k].index;
      const double numeric = probes[k].numeric;
      const double analytic = p.grad.size() == 0 ? 0.0 : p.grad.data()[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), options.abs_floor});
      double rel = std::abs(analytic - numeric) / denom;
      if (std::isnan(rel)) rel = std::numeric_limits<double>::infinity();
      ++tc.checked;
      if (probes[k].kinked) ++tc.kinked;
      if (rel > tc.max_rel_error || tc.worst_index < 0) {
        tc.max_rel_error = rel;
        tc.worst_index = i;
        tc.analytic = analytic;
        tc.numeric = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.tensors.push_back(std::move(tc));
  }
  return report;
}

}  // namespace gdst::nn
