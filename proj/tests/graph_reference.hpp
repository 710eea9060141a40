#pragma once

#include "graphdst/graph.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <tuple>

namespace gdst::testsupport {

// Node and edge sets re-derived from the graph rules without the builder's
// bookkeeping: a domain is present iff one of its pairs holds a text value,
// each such pair is a placeholder hung off its domain by its slot label, and
// every two present domains are joined once.
struct Reference {
  std::set<std::size_t> domains;
  std::set<std::tuple<std::size_t, std::size_t, std::string>> slot_edges;  // domain, pair, slot
  std::set<std::pair<std::size_t, std::size_t>> cooccur;
  std::set<std::pair<std::size_t, std::size_t>> fusion;  // position, domain
};

inline Reference reference_graph(const DialogueState& s, const Schema& schema) {
  Reference r;
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    if (s[j].kind() == SlotValue::Kind::kText) {
      r.domains.insert(schema.pair(j).domain_index);
      r.slot_edges.insert({schema.pair(j).domain_index, j, schema.pair(j).slot});
    }
  }
  for (std::size_t a : r.domains) {
    for (std::size_t b : r.domains) {
      if (a < b) r.cooccur.insert({a, b});
    }
  }
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    if (r.domains.count(schema.pair(j).domain_index)) r.fusion.insert({j, schema.pair(j).domain_index});
  }
  return r;
}

/// The builder's output in the reference's terms. Placeholder bookkeeping that
/// disagrees with its edge is recorded as an impossible edge.
inline Reference as_reference(const StateGraph& g, const Schema& schema) {
  Reference r;
  for (auto d : g.domain_nodes) r.domains.insert(d);
  for (const auto& e : g.slot_edges) {
    const auto& ph = g.placeholders.at(e.placeholder);
    if (ph.domain_node != e.domain_node || ph.slot_name != e.slot_name) {
      r.slot_edges.insert({SIZE_MAX, SIZE_MAX, ""});
      continue;
    }
    r.slot_edges.insert({g.domain_nodes.at(e.domain_node), ph.pair, schema.slot_names().at(e.slot_name)});
  }
  for (const auto& e : g.cooccurrence_edges) {
    r.cooccur.insert({g.domain_nodes.at(e.a), g.domain_nodes.at(e.b)});
  }
  for (const auto& t : g.fusion_targets) r.fusion.insert({t.position, g.domain_nodes.at(t.domain_node)});
  return r;
}

inline bool operator==(const Reference& a, const Reference& b) {
  return a.domains == b.domains && a.slot_edges == b.slot_edges && a.cooccur == b.cooccur &&
         a.fusion == b.fusion;
}

}  // namespace gdst::testsupport
