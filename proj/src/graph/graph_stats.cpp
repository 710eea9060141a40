#include "graphdst/graph.hpp"
#include "graphdst/state.hpp"

#include <iomanip>
#include <set>
#include <sstream>

namespace gdst {

std::vector<StateTransition> corpus_transitions(std::span<const Dialogue> corpus,
                                                std::size_t pair_count) {
  std::vector<StateTransition> out;
  for (const auto& d : corpus) {
    DialogueState prev = DialogueState::empty(pair_count);
    for (const auto& turn : d.turns) {
      out.push_back({prev, turn.gold_state});
      prev = turn.gold_state;
    }
  }
  return out;
}

GraphStats graph_stats(std::span<const StateTransition> transitions, const Schema& schema) {
  GraphStats s;
  s.graphs = transitions.size();
  if (transitions.empty()) return s;
  std::size_t in_prev = 0;
  for (const auto& tr : transitions) {
    const StateGraph g = build_state_graph(tr.prev, schema);
    s.edges += static_cast<double>(g.edge_count());
    s.edge_types += static_cast<double>(g.edge_type_count());
    s.nodes += static_cast<double>(g.node_count());
    s.domains += static_cast<double>(g.domain_nodes.size());
    s.values += static_cast<double>(g.placeholders.size());
    s.at_least_two_domains += g.domain_nodes.size() >= 2 ? 1.0 : 0.0;
    s.at_least_three_domains += g.domain_nodes.size() >= 3 ? 1.0 : 0.0;

    const OperationMap ops = derive_operations(tr.prev, tr.gold);
    std::set<std::string> prev_values;
    for (const auto& v : tr.prev.values) {
      if (v.is_text()) prev_values.insert(v.str());
    }
    bool any_update = false;
    bool all_known = true;
    for (const auto& op : ops) {
      if (op.kind != OpKind::kUpdate) continue;
      any_update = true;
      if (prev_values.count(op.value) == 0) all_known = false;
    }
    if (any_update) {
      ++s.update_transitions;
      if (all_known) ++in_prev;
    }
  }
  const double n = static_cast<double>(transitions.size());
  s.edges /= n;
  s.edge_types /= n;
  s.nodes /= n;
  s.domains /= n;
  s.values /= n;
  s.at_least_two_domains /= n;
  s.at_least_three_domains /= n;
  s.update_values_in_prev_state =
      s.update_transitions == 0
          ? 0.0
          : static_cast<double>(in_prev) / static_cast<double>(s.update_transitions);
  return s;
}

std::string graph_stats_csv(const std::vector<std::pair<std::string, GraphStats>>& splits) {
  std::ostringstream os;
  os << "split,# edges,# edge types,# nodes,# domains,# values,>=2 domains,>=3 domains,"
        "in dialog state\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& [name, s] : splits) {
    os << name << "," << s.edges << "," << s.edge_types << "," << s.nodes << "," << s.domains << ","
       << s.values << "," << s.at_least_two_domains << "," << s.at_least_three_domains << ","
       << s.update_values_in_prev_state << "\n";
  }
  return os.str();
}

nlohmann::ordered_json graph_stats_json(const GraphStats& s) {
  nlohmann::ordered_json j;
  j["graphs"] = s.graphs;
  j["edges"] = s.edges;
  j["edge_types"] = s.edge_types;
  j["nodes"] = s.nodes;
  j["domains"] = s.domains;
  j["values"] = s.values;
  j["at_least_two_domains"] = s.at_least_two_domains;
  j["at_least_three_domains"] = s.at_least_three_domains;
  j["in_dialog_state"] = s.update_values_in_prev_state;
  j["update_transitions"] = s.update_transitions;
  return j;
}

}  // namespace gdst
