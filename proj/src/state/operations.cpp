#include "graphdst/errors.hpp"
#include "graphdst/state.hpp"

namespace gdst {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kCarryover: return "CARRYOVER";
    case OpKind::kDelete: return "DELETE";
    case OpKind::kDontCare: return "DONTCARE";
    case OpKind::kUpdate: return "UPDATE";
  }
  return "?";
}

OpKind op_kind_from_string(std::string_view name) {
  for (auto k : {OpKind::kCarryover, OpKind::kDelete, OpKind::kDontCare, OpKind::kUpdate}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown state operation '" + std::string(name) + "'");
}

OperationMap derive_operations(const DialogueState& prev, const DialogueState& gold) {
  if (prev.size() != gold.size()) {
    throw ValidationError("derive_operations: states over different schemas (" +
                          std::to_string(prev.size()) + " vs " + std::to_string(gold.size()) +
                          " pairs)");
  }
  OperationMap ops(gold.size());
  for (std::size_t j = 0; j < gold.size(); ++j) {
    if (prev[j] == gold[j]) continue;
    if (gold[j].is_null()) {
      ops[j] = StateOperation::remove();
    } else if (gold[j].is_dontcare()) {
      ops[j] = StateOperation::dontcare();
    } else {
      ops[j] = StateOperation::update(gold[j].str());
    }
  }
  return ops;
}

DialogueState apply_operations(const DialogueState& prev, const OperationMap& ops) {
  if (ops.size() != prev.size()) {
    throw ValidationError("apply_operations: " + std::to_string(ops.size()) + " operations for " +
                          std::to_string(prev.size()) + " pairs");
  }
  DialogueState next = prev;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    switch (ops[j].kind) {
      case OpKind::kCarryover: break;
      case OpKind::kDelete: next[j] = SlotValue::null(); break;
      case OpKind::kDontCare: next[j] = SlotValue::dontcare(); break;
      case OpKind::kUpdate: next[j] = SlotValue::text(ops[j].value); break;
    }
  }
  return next;
}

}  // namespace gdst
