#pragma once

#include "graphdst/dialogue.hpp"
#include "graphdst/schema.hpp"

#include <random>

namespace gdst::testsupport {

/// Each pair is NULL with probability `p_null`, DONTCARE with `p_dontcare`,
/// otherwise a value drawn from its pool.
inline DialogueState random_state(const Schema& schema, std::mt19937_64& rng, double p_null = 0.5,
                                  double p_dontcare = 0.15) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DialogueState s = DialogueState::empty(schema.pair_count());
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    const double r = u(rng);
    if (r < p_null) continue;
    if (r < p_null + p_dontcare) {
      s[j] = SlotValue::dontcare();
      continue;
    }
    const auto& pool = schema.value_pool(j);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    s[j] = SlotValue::text(pool[pick(rng)]);
  }
  return s;
}

}  // namespace gdst::testsupport
