#pragma once

#include "graphdst/dialogue.hpp"
#include "graphdst/schema.hpp"
#include "graphdst/vocab.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdst {

enum class OpKind : std::uint8_t { kCarryover = 0, kDelete = 1, kDontCare = 2, kUpdate = 3 };
inline constexpr std::size_t kNumOperations = 4;

std::string_view to_string(OpKind kind);
OpKind op_kind_from_string(std::string_view name);

/// The transition applied to one (domain, slot) pair at one turn. Only
/// UPDATE carries a value.
struct StateOperation {
  OpKind kind = OpKind::kCarryover;
  std::string value;

  static StateOperation carryover() { return {}; }
  static StateOperation remove() { return {OpKind::kDelete, {}}; }
  static StateOperation dontcare() { return {OpKind::kDontCare, {}}; }
  static StateOperation update(std::string value) { return {OpKind::kUpdate, std::move(value)}; }

  friend bool operator==(const StateOperation&, const StateOperation&) = default;
};

/// One operation per pair, indexed in schema order.
using OperationMap = std::vector<StateOperation>;

/// The unique operations taking `prev` to `gold`: CARRYOVER iff the values are
/// equal, DELETE iff gold is NULL, DONTCARE iff gold is DONTCARE, otherwise
/// UPDATE with gold's text. Throws ValidationError if the sizes differ.
OperationMap derive_operations(const DialogueState& prev, const DialogueState& gold);

/// Functional update; `prev` is not modified.
DialogueState apply_operations(const DialogueState& prev, const OperationMap& ops);

/// Model input for one turn.
struct EncodedInput {
  std::vector<TokenId> token_ids;
  std::vector<int> segment_ids;
  std::vector<std::int64_t> position_ids;
  /// Sequence position of the [SLOT] marker of pair j.
  std::vector<std::size_t> slot_positions;
  std::size_t cls_position = 0;

  std::size_t size() const { return token_ids.size(); }
};

/// Lays out [CLS] D_{t-1} [SEP] D_t [SEP] followed by
/// [SLOT] domain - slot - value for every pair in schema order. A dialogue
/// turn contributes its system then user tokens; `prev_turn` may be null.
///
/// Over-long inputs lose tokens from the left of D_{t-1}, then of D_t; the
/// state span is never cut. Throws ValidationError if the state span alone
/// does not fit in `max_len`.
EncodedInput serialize_input(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                             const DialogueState& prev_state, const Schema& schema,
                             const Vocabulary& vocab, std::size_t max_len);

struct AccuracyReport {
  std::size_t turns = 0;
  double joint = 0.0;
  double slot = 0.0;
  /// Joint accuracy restricted to each domain's pairs, in schema order.
  std::vector<double> per_domain;
};

/// Joint, slot and per-domain accuracy. Empty inputs give all zeros; a length
/// mismatch throws ValidationError.
AccuracyReport evaluate_states(std::span<const DialogueState> pred,
                               std::span<const DialogueState> gold, const Schema& schema);
double joint_goal_accuracy(std::span<const DialogueState> pred, std::span<const DialogueState> gold);

}  // namespace gdst
