#include "graphdst/errors.hpp"
#include "graphdst/state.hpp"

namespace gdst {

namespace {

void check_lengths(std::size_t pred, std::size_t gold) {
  if (pred != gold) {
    throw ValidationError("metrics: " + std::to_string(pred) + " predicted states for " +
                          std::to_string(gold) + " gold states");
  }
}

}  // namespace

AccuracyReport evaluate_states(std::span<const DialogueState> pred,
                               std::span<const DialogueState> gold, const Schema& schema) {
  check_lengths(pred.size(), gold.size());
  AccuracyReport r;
  r.turns = gold.size();
  r.per_domain.assign(schema.domains().size(), 0.0);
  if (gold.empty()) return r;

  std::size_t joint_hits = 0;
  std::size_t slot_hits = 0;
  std::vector<std::size_t> domain_hits(schema.domains().size(), 0);
  for (std::size_t t = 0; t < gold.size(); ++t) {
    if (pred[t].size() != schema.pair_count() || gold[t].size() != schema.pair_count()) {
      throw ValidationError("metrics: state does not match schema");
    }
    std::vector<bool> domain_ok(schema.domains().size(), true);
    bool all_ok = true;
    for (std::size_t j = 0; j < schema.pair_count(); ++j) {
      if (pred[t][j] == gold[t][j]) {
        ++slot_hits;
      } else {
        all_ok = false;
        domain_ok[schema.pair(j).domain_index] = false;
      }
    }
    if (all_ok) ++joint_hits;
    for (std::size_t d = 0; d < domain_ok.size(); ++d) domain_hits[d] += domain_ok[d] ? 1 : 0;
  }
  const double n = static_cast<double>(gold.size());
  r.joint = static_cast<double>(joint_hits) / n;
  r.slot = static_cast<double>(slot_hits) / (n * static_cast<double>(schema.pair_count()));
  for (std::size_t d = 0; d < domain_hits.size(); ++d) {
    r.per_domain[d] = static_cast<double>(domain_hits[d]) / n;
  }
  return r;
}

double joint_goal_accuracy(std::span<const DialogueState> pred,
                           std::span<const DialogueState> gold) {
  check_lengths(pred.size(), gold.size());
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gold.size(); ++t) hits += pred[t] == gold[t] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

}  // namespace gdst
