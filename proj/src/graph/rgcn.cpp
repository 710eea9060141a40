#include "graphdst/errors.hpp"
#include "graphdst/graph.hpp"

#include <cmath>

namespace gdst {

using nn::Index;
using nn::Matrix;
using nn::Tensor;

namespace {

Tensor activate(const Tensor& x, GcnActivation f) {
  return f == GcnActivation::kRelu ? nn::relu(x) : x;
}

}  // namespace

RgcnOutput rgcn_update(const StateGraph& graph, const Tensor& attn, const GraphEmbeddings& emb,
                       const RgcnOptions& options) {
  RgcnOutput out;
  if (graph.empty()) return out;
  if (emb.layers.empty()) throw ShapeError("rgcn_update: no GCN layers");

  const auto k = static_cast<Index>(graph.domain_nodes.size());
  const auto m = static_cast<Index>(graph.placeholders.size());
  std::vector<Index> domain_ids;
  for (auto d : graph.domain_nodes) domain_ids.push_back(static_cast<Index>(d));
  std::vector<Index> positions;
  std::vector<Index> slot_ids;
  std::vector<Index> owner;
  Matrix incidence = Matrix::Zero(k, m);
  for (Index i = 0; i < m; ++i) {
    const auto& ph = graph.placeholders[static_cast<std::size_t>(i)];
    if (static_cast<Index>(ph.position) >= attn.rows()) {
      throw ShapeError("rgcn_update: placeholder position " + std::to_string(ph.position) +
                       " outside a " + std::to_string(attn.rows()) + "-row input");
    }
    positions.push_back(static_cast<Index>(ph.position));
    slot_ids.push_back(static_cast<Index>(ph.slot_name));
    owner.push_back(static_cast<Index>(ph.domain_node));
    incidence(static_cast<Index>(ph.domain_node), i) = 1.0;
  }
  Matrix adjacency = Matrix::Zero(k, k);
  for (const auto& e : graph.cooccurrence_edges) {
    adjacency(static_cast<Index>(e.a), static_cast<Index>(e.b)) = 1.0;
    adjacency(static_cast<Index>(e.b), static_cast<Index>(e.a)) = 1.0;
  }
  const Tensor incidence_t = Tensor::constant(std::move(incidence));
  const Tensor adjacency_t = Tensor::constant(std::move(adjacency));

  Tensor h = nn::gather_rows(emb.domain, domain_ids);
  Tensor values = nn::gather_rows(attn, positions);
  for (const auto& layer : emb.layers) {
    Tensor slot_edges = nn::gather_rows(layer.slot_edge, slot_ids);
    Tensor pre = nn::matmul(nn::sub_row(h, layer.self_loop), layer.w_self);
    Tensor messages = nn::matmul(nn::sub(values, slot_edges), layer.w_out);
    pre = nn::add(pre, nn::matmul(incidence_t, messages));
    if (!graph.cooccurrence_edges.empty()) {
      Tensor neighbours = nn::matmul(adjacency_t, nn::sub_row(h, layer.cooccur));
      pre = nn::add(pre, nn::matmul(neighbours, nn::add(layer.w_in, layer.w_out)));
    }
    Tensor next = activate(pre, options.activation);
    if (options.update_placeholders) {
      Tensor self = nn::matmul(nn::sub_row(values, layer.self_loop), layer.w_self);
      Tensor incoming =
          nn::matmul(nn::sub(nn::gather_rows(h, owner), slot_edges), layer.w_in);
      values = activate(nn::add(self, incoming), options.activation);
    }
    h = next;
  }
  out.domains = h;
  std::vector<Tensor> rows = {h, values};
  out.nodes = nn::concat_rows(rows);
  return out;
}

Tensor fuse(const Tensor& attn, const StateGraph& graph, const Tensor& domain_repr,
            const FusionParams& params) {
  if (graph.fusion_targets.empty()) return attn;
  if (!domain_repr.defined() ||
      domain_repr.rows() != static_cast<Index>(graph.domain_nodes.size())) {
    throw ShapeError("fuse: domain representations do not cover the graph");
  }
  std::vector<Index> positions;
  std::vector<Index> nodes;
  for (const auto& t : graph.fusion_targets) {
    positions.push_back(static_cast<Index>(t.position));
    nodes.push_back(static_cast<Index>(t.domain_node));
  }
  Tensor c = nn::gather_rows(attn, positions);
  Tensor g = nn::gather_rows(domain_repr, nodes);
  Tensor beta = nn::sigmoid(nn::add_row(nn::matmul(c, params.w_beta), params.b_beta));
  Tensor mix = nn::add(nn::scale_rows(c, beta), nn::scale_rows(g, nn::one_minus(beta)));
  Tensor fused = nn::layer_norm(mix, params.ln_gain, params.ln_bias);
  return nn::scatter_rows(attn, positions, fused);
}

Tensor graph_attention(const Tensor& query, const Tensor& nodes) {
  if (!nodes.defined() || nodes.rows() == 0) return Tensor::zeros(1, query.cols());
  if (query.rows() != 1 || query.cols() != nodes.cols()) {
    throw ShapeError("graph_attention: query must be 1 x d_h");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.cols()));
  Tensor weights = nn::softmax_rows(nn::scale(nn::matmul_nt(query, nodes), scale));
  return nn::matmul(weights, nodes);
}

}  // namespace gdst
