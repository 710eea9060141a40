#include "graphdst/errors.hpp"
#include "graphdst/state.hpp"

namespace gdst {

namespace {

std::vector<TokenId> turn_tokens(const DialogueTurn* turn, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  if (turn == nullptr) return out;
  auto a = vocab.encode(turn->system_utterance);
  auto b = vocab.encode(turn->user_utterance);
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void drop_front(std::vector<TokenId>& v, std::size_t n) {
  n = std::min(n, v.size());
  v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
}

}  // namespace

EncodedInput serialize_input(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                             const DialogueState& prev_state, const Schema& schema,
                             const Vocabulary& vocab, std::size_t max_len) {
  if (prev_state.size() != schema.pair_count()) {
    throw ValidationError("serialize_input: state has " + std::to_string(prev_state.size()) +
                          " pairs, schema has " + std::to_string(schema.pair_count()));
  }

  std::vector<TokenId> state_span;
  std::vector<std::size_t> slot_offsets;
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    const SlotPair& p = schema.pair(j);
    slot_offsets.push_back(state_span.size());
    state_span.push_back(Vocabulary::kSlot);
    state_span.push_back(vocab.id(p.domain));
    state_span.push_back(Vocabulary::kDash);
    state_span.push_back(vocab.id(p.slot));
    state_span.push_back(Vocabulary::kDash);
    const SlotValue& v = prev_state[j];
    if (v.is_null()) {
      state_span.push_back(Vocabulary::kNull);
    } else if (v.is_dontcare()) {
      state_span.push_back(Vocabulary::kDontCare);
    } else {
      for (const auto& t : tokenize(v.str())) state_span.push_back(vocab.id(t));
    }
  }

  const std::size_t fixed = state_span.size() + 3;  // [CLS] and two [SEP]
  if (fixed > max_len) {
    throw ValidationError("serialize_input: state span needs " + std::to_string(fixed) +
                          " positions, max_seq_len is " + std::to_string(max_len));
  }
  auto prev_tokens = turn_tokens(prev_turn, vocab);
  auto cur_tokens = turn_tokens(&cur_turn, vocab);
  const std::size_t budget = max_len - fixed;
  if (prev_tokens.size() + cur_tokens.size() > budget) {
    const std::size_t excess = prev_tokens.size() + cur_tokens.size() - budget;
    const std::size_t from_prev = std::min(excess, prev_tokens.size());
    drop_front(prev_tokens, from_prev);
    drop_front(cur_tokens, excess - from_prev);
  }

  EncodedInput in;
  auto push = [&](TokenId id, int segment) {
    in.token_ids.push_back(id);
    in.segment_ids.push_back(segment);
    in.position_ids.push_back(static_cast<std::int64_t>(in.position_ids.size()));
  };
  push(Vocabulary::kCls, 0);
  for (auto id : prev_tokens) push(id, 0);
  push(Vocabulary::kSep, 0);
  for (auto id : cur_tokens) push(id, 1);
  push(Vocabulary::kSep, 1);
  const std::size_t state_start = in.token_ids.size();
  for (auto id : state_span) push(id, 1);
  for (auto off : slot_offsets) in.slot_positions.push_back(state_start + off);
  in.cls_position = 0;
  return in;
}

}  // namespace gdst
