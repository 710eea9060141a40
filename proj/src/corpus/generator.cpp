#include "graphdst/corpus.hpp"

#include "graphdst/errors.hpp"

#include <algorithm>
#include <random>

namespace gdst {

namespace {

class DialogueSynthesizer {
 public:
  DialogueSynthesizer(const Schema& schema, std::uint64_t seed) : schema_(schema), rng_(seed) {}

  Dialogue make(std::string id, std::size_t max_turns) {
    const std::size_t min_turns = (max_turns + 1) / 2;
    const std::size_t n_turns = min_turns + uniform(max_turns - min_turns + 1);

    Dialogue dialogue;
    dialogue.dialogue_id = std::move(id);
    DialogueState state = DialogueState::empty(schema_.pair_count());
    std::size_t domain = uniform(schema_.domains().size());
    std::size_t prev_domain = domain;
    for (std::size_t t = 0; t < n_turns; ++t) {
      if (t > 0) domain = next_domain(domain);
      DialogueTurn turn;
      turn.system_utterance = tokenize(system_utterance(t, prev_domain, state));
      turn.user_utterance = tokenize(user_utterance(t, domain, state));
      turn.gold_state = state;
      dialogue.turns.push_back(std::move(turn));
      prev_domain = domain;
    }
    return dialogue;
  }

 private:
  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  std::size_t next_domain(std::size_t from) {
    const std::size_t n = schema_.domains().size();
    double total = 0.0;
    for (std::size_t d = 0; d < n; ++d) total += schema_.transition_weight(from, d);
    if (total <= 0.0) return uniform(n);
    double r = std::uniform_real_distribution<double>(0.0, total)(rng_);
    for (std::size_t d = 0; d < n; ++d) {
      r -= schema_.transition_weight(from, d);
      if (r < 0.0) return d;
    }
    for (std::size_t d = n; d-- > 0;) {
      if (schema_.transition_weight(from, d) > 0.0) return d;
    }
    return from;
  }

  std::string system_utterance(std::size_t t, std::size_t prev_domain, const DialogueState& state) {
    if (t == 0) return "hello , how can i help you ?";
    for (std::size_t j : schema_.pairs_of(prev_domain)) {
      if (state[j].is_null()) {
        return "what " + schema_.pair(j).slot + " would you like for the " +
               schema_.domains()[prev_domain] + " ?";
      }
    }
    return "is there anything else i can help with ?";
  }

  const ValueLink* link_for(std::size_t j) const {
    for (const auto& l : schema_.links()) {
      if (l.target == j) return &l;
    }
    return nullptr;
  }

  std::string pick_value(std::size_t j, const SlotValue& avoid) {
    const auto& pool = schema_.value_pool(j);
    for (int attempt = 0; attempt < 16; ++attempt) {
      const auto& v = pool[uniform(pool.size())];
      if (!(avoid.is_text() && avoid.str() == v)) return v;
    }
    return pool.front();
  }

  std::string user_utterance(std::size_t t, std::size_t domain, DialogueState& state) {
    const std::string& dname = schema_.domains()[domain];
    std::vector<std::size_t> unfilled;
    std::vector<std::size_t> filled;
    for (std::size_t j : schema_.pairs_of(domain)) {
      (state[j].is_null() ? unfilled : filled).push_back(j);
    }

    if (t > 0 && coin(0.08)) return "thank you , that will be all";

    if (!unfilled.empty() && (filled.empty() || coin(0.7))) {
      std::shuffle(unfilled.begin(), unfilled.end(), rng_);
      std::size_t k = 1 + (coin(0.5) ? 1 : 0) + (coin(0.25) ? 1 : 0);
      k = std::min(k, unfilled.size());
      unfilled.resize(k);
      std::sort(unfilled.begin(), unfilled.end());
      std::string out = "i need a " + dname + " with";
      for (std::size_t i = 0; i < unfilled.size(); ++i) {
        const std::size_t j = unfilled[i];
        const std::string& slot = schema_.pair(j).slot;
        if (i > 0) out += " and";
        const bool first_value = t == 0 && i == 0;
        std::vector<std::size_t> sources;
        if (const ValueLink* link = link_for(j)) {
          for (std::size_t s : link->sources) {
            if (state[s].is_text()) sources.push_back(s);
          }
        }
        if (!first_value && coin(0.1)) {
          state[j] = SlotValue::dontcare();
          out += " any " + slot;
        } else if (!sources.empty()) {
          const std::size_t s = sources[uniform(sources.size())];
          state[j] = state[s];
          out += " " + slot + " same as the " + schema_.pair(s).domain;
        } else {
          const std::string v = pick_value(j, state[j]);
          state[j] = SlotValue::text(v);
          out += " " + slot + " " + v;
        }
      }
      return out;
    }

    const std::size_t j = filled[uniform(filled.size())];
    const std::string& slot = schema_.pair(j).slot;
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (r < 0.5 || (r >= 0.75 && state[j].is_dontcare())) {
      const std::string v = pick_value(j, state[j]);
      state[j] = SlotValue::text(v);
      return "please change the " + dname + " " + slot + " to " + v;
    }
    if (r < 0.75) {
      state[j] = SlotValue::null();
      return "forget the " + dname + " " + slot;
    }
    state[j] = SlotValue::dontcare();
    return "i do not care about the " + dname + " " + slot;
  }

  const Schema& schema_;
  std::mt19937_64 rng_;
};

}  // namespace

std::vector<Dialogue> generate_corpus(const Schema& schema, std::size_t n_dialogues,
                                      std::size_t max_turns, std::uint64_t seed) {
  if (max_turns < 1) throw SchemaError("max_turns", "must be at least 1");
  DialogueSynthesizer synth(schema, seed);
  std::vector<Dialogue> out;
  out.reserve(n_dialogues);
  for (std::size_t i = 0; i < n_dialogues; ++i) {
    out.push_back(synth.make("dlg-" + std::to_string(seed) + "-" + std::to_string(i), max_turns));
  }
  return out;
}

}  // namespace gdst
