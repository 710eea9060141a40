#pragma once

#include "graphdst/dialogue.hpp"
#include "graphdst/numerics/ops.hpp"
#include "graphdst/schema.hpp"

#include <span>
#include <string>
#include <vector>

namespace gdst {

/// A value node. It has no embedding of its own: the GCN fills it with the
/// attention output at the pair's [SLOT] position.
struct ValuePlaceholder {
  std::size_t pair = 0;
  std::size_t domain_node = 0;  // index into StateGraph::domain_nodes
  std::size_t slot_name = 0;    // index into Schema::slot_names()
  std::size_t position = 0;     // [SLOT] position in the encoded input
};

/// Directed domain -> placeholder edge labelled by the slot name.
struct SlotEdge {
  std::size_t domain_node = 0;
  std::size_t placeholder = 0;
  std::size_t slot_name = 0;
};

/// Undirected edge between two present domains, a < b.
struct CooccurrenceEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const CooccurrenceEdge&, const CooccurrenceEdge&) = default;
};

/// [SLOT] position that receives its domain's GCN output during fusion.
struct FusionTarget {
  std::size_t position = 0;
  std::size_t domain_node = 0;
};

/// Multi-relational graph over the previous dialogue state. Only pairs whose
/// value is neither NULL nor DONTCARE contribute; node order follows the
/// schema.
struct StateGraph {
  std::vector<std::size_t> domain_nodes;  // schema domain indices
  std::vector<ValuePlaceholder> placeholders;
  std::vector<SlotEdge> slot_edges;
  std::vector<CooccurrenceEdge> cooccurrence_edges;
  /// Every [SLOT] position whose domain is a node, filled or not.
  std::vector<FusionTarget> fusion_targets;

  bool empty() const { return domain_nodes.empty(); }
  std::size_t node_count() const { return domain_nodes.size() + placeholders.size(); }
  std::size_t edge_count() const { return slot_edges.size() + cooccurrence_edges.size(); }
  /// Distinct slot labels, plus one if any co-occurrence edge exists.
  std::size_t edge_type_count() const;
};

/// `slot_positions[j]` is the [SLOT] position of pair j.
StateGraph build_state_graph(const DialogueState& prev, const Schema& schema,
                             std::span<const std::size_t> slot_positions);
/// Same graph with placeholder positions set to the pair index.
StateGraph build_state_graph(const DialogueState& prev, const Schema& schema);

enum class GcnActivation { kRelu, kIdentity };

/// Weights of one relational GCN layer.
struct GcnLayerParams {
  nn::Tensor w_self;     // W_S, d x d
  nn::Tensor w_in;       // W_I, d x d
  nn::Tensor w_out;      // W_O, d x d
  nn::Tensor self_loop;  // e_S, 1 x d
  nn::Tensor cooccur;    // e_co, 1 x d
  nn::Tensor slot_edge;  // e_sl for every slot name, S x d
};

struct GraphEmbeddings {
  nn::Tensor domain;  // e_d for every schema domain, D x d
  std::vector<GcnLayerParams> layers;
};

struct RgcnOptions {
  GcnActivation activation = GcnActivation::kRelu;
  /// Also rewrite placeholders from their incoming slot edge; off by default.
  bool update_placeholders = false;
};

struct RgcnOutput {
  /// g_d, one row per graph.domain_nodes entry.
  nn::Tensor domains;
  /// G': domain rows followed by placeholder rows. Undefined for an empty graph.
  nn::Tensor nodes;
};

/// For each domain node d and each layer:
///   g_d = f(W_S (h_d - e_S) + sum_{(v,sl)} W_O (c_v - e_sl)
///           + sum_{d'} (W_I + W_O)(h_d' - e_co))
/// with h_d = e_d at the first layer and the previous layer's g_d after it,
/// and c_v the row of `attn` at the placeholder's [SLOT] position.
RgcnOutput rgcn_update(const StateGraph& graph, const nn::Tensor& attn, const GraphEmbeddings& emb,
                       const RgcnOptions& options = {});

struct FusionParams {
  nn::Tensor w_beta;  // d x 1
  nn::Tensor b_beta;  // 1 x 1
  nn::Tensor ln_gain;
  nn::Tensor ln_bias;
};

/// c'_p = LayerNorm(beta c_p + (1 - beta) g_d), beta = sigmoid(c_p w_beta + b_beta),
/// at every fusion target; all other rows of `attn` pass through untouched.
/// With an empty graph the input tensor itself is returned.
nn::Tensor fuse(const nn::Tensor& attn, const StateGraph& graph, const nn::Tensor& domain_repr,
                const FusionParams& params);

/// softmax(query G'^T / sqrt(d)) G'. An undefined or empty G' yields zeros.
nn::Tensor graph_attention(const nn::Tensor& query, const nn::Tensor& nodes);

/// One previous/current gold state pair.
struct StateTransition {
  DialogueState prev;
  DialogueState gold;
};

/// Every turn of every dialogue, with the all-NULL state before turn 0.
std::vector<StateTransition> corpus_transitions(std::span<const Dialogue> corpus,
                                                std::size_t pair_count);

/// Means are over previous-state graphs, one per transition.
struct GraphStats {
  std::size_t graphs = 0;
  double edges = 0.0;
  double edge_types = 0.0;
  double nodes = 0.0;
  double domains = 0.0;
  double values = 0.0;
  double at_least_two_domains = 0.0;
  double at_least_three_domains = 0.0;
  /// Among transitions with at least one UPDATE, the fraction whose UPDATE
  /// values all already occur somewhere in the previous state.
  double update_values_in_prev_state = 0.0;
  std::size_t update_transitions = 0;
};

GraphStats graph_stats(std::span<const StateTransition> transitions, const Schema& schema);

/// One row per split.
std::string graph_stats_csv(const std::vector<std::pair<std::string, GraphStats>>& splits);
nlohmann::ordered_json graph_stats_json(const GraphStats& stats);

}  // namespace gdst
