#include "graphdst/errors.hpp"
#include "graphdst/graph.hpp"

#include <set>

namespace gdst {

std::size_t StateGraph::edge_type_count() const {
  std::set<std::size_t> labels;
  for (const auto& e : slot_edges) labels.insert(e.slot_name);
  return labels.size() + (cooccurrence_edges.empty() ? 0 : 1);
}

StateGraph build_state_graph(const DialogueState& prev, const Schema& schema,
                             std::span<const std::size_t> slot_positions) {
  if (prev.size() != schema.pair_count() || slot_positions.size() != schema.pair_count()) {
    throw ValidationError("build_state_graph: state/positions do not match the schema");
  }
  StateGraph g;
  std::vector<std::size_t> node_of(schema.domains().size(), SIZE_MAX);
  for (std::size_t d = 0; d < schema.domains().size(); ++d) {
    for (std::size_t j : schema.pairs_of(d)) {
      if (prev[j].is_filled()) {
        node_of[d] = g.domain_nodes.size();
        g.domain_nodes.push_back(d);
        break;
      }
    }
  }
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    const SlotPair& p = schema.pair(j);
    const std::size_t node = node_of[p.domain_index];
    if (node == SIZE_MAX) continue;
    g.fusion_targets.push_back({slot_positions[j], node});
    if (!prev[j].is_filled()) continue;
    g.slot_edges.push_back({node, g.placeholders.size(), p.slot_name_index});
    g.placeholders.push_back({j, node, p.slot_name_index, slot_positions[j]});
  }
  for (std::size_t a = 0; a < g.domain_nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < g.domain_nodes.size(); ++b) g.cooccurrence_edges.push_back({a, b});
  }
  return g;
}

StateGraph build_state_graph(const DialogueState& prev, const Schema& schema) {
  std::vector<std::size_t> positions(schema.pair_count());
  for (std::size_t j = 0; j < positions.size(); ++j) positions[j] = j;
  return build_state_graph(prev, schema, positions);
}

}  // namespace gdst
