#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/graph.hpp"
#include "graphdst/numerics/layers.hpp"
#include "graph_reference.hpp"
#include "state_support.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <set>
#include <tuple>

using namespace gdst;
using nn::Index;
using nn::Matrix;
using nn::Tensor;
using testsupport::random_matrix;
using testsupport::random_state;
using testsupport::as_reference;
using testsupport::reference_graph;
using testsupport::Reference;

namespace {

DialogueState state_of(const Schema& schema,
                       std::initializer_list<std::tuple<const char*, const char*, SlotValue>> items) {
  DialogueState s = DialogueState::empty(schema.pair_count());
  for (const auto& [d, sl, v] : items) s[*schema.pair_index(d, sl)] = v;
  return s;
}

GraphEmbeddings random_embeddings(const Schema& schema, Index d, std::size_t layers,
                                  std::mt19937_64& rng) {
  GraphEmbeddings e;
  e.domain = Tensor::constant(random_matrix(static_cast<Index>(schema.domains().size()), d, rng));
  for (std::size_t l = 0; l < layers; ++l) {
    GcnLayerParams p;
    p.w_self = Tensor::constant(random_matrix(d, d, rng, 0.5));
    p.w_in = Tensor::constant(random_matrix(d, d, rng, 0.5));
    p.w_out = Tensor::constant(random_matrix(d, d, rng, 0.5));
    p.self_loop = Tensor::constant(random_matrix(1, d, rng));
    p.cooccur = Tensor::constant(random_matrix(1, d, rng));
    p.slot_edge =
        Tensor::constant(random_matrix(static_cast<Index>(schema.slot_names().size()), d, rng));
    e.layers.push_back(p);
  }
  return e;
}

FusionParams fusion_params(Index d, double w_scale, double bias, std::mt19937_64& rng) {
  return {Tensor::constant(random_matrix(d, 1, rng, w_scale)),
          Tensor::constant(Matrix::Constant(1, 1, bias)), Tensor::constant(Matrix::Ones(1, d)),
          Tensor::constant(Matrix::Zero(1, d))};
}

Matrix layer_norm_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    out.row(r) = (x.row(r).array() - mean) / std::sqrt(var + 1e-12);
  }
  return out;
}

}  // namespace

TEST_CASE("the two-domain example graph") {
  const Schema schema = default_schema();
  const DialogueState s =
      state_of(schema, {{"hotel", "name", SlotValue::text("acorn house")},
                        {"restaurant", "food", SlotValue::text("italian")},
                        {"train", "day", SlotValue::dontcare()}});
  const StateGraph g = build_state_graph(s, schema);
  CHECK(g.domain_nodes == std::vector<std::size_t>{*schema.domain_index("hotel"),
                                                   *schema.domain_index("restaurant")});
  CHECK(g.placeholders.size() == 2);
  CHECK(g.slot_edges.size() == 2);
  CHECK(g.cooccurrence_edges == std::vector<CooccurrenceEdge>{{0, 1}});
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.edge_type_count() == 3);
  // hotel has 4 pairs and restaurant 3; every one of them is fused.
  CHECK(g.fusion_targets.size() == 7);
}

TEST_CASE("empty and DONTCARE-only states give an empty graph") {
  const Schema schema = default_schema();
  CHECK(build_state_graph(DialogueState::empty(schema.pair_count()), schema).empty());
  DialogueState s = DialogueState::empty(schema.pair_count());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = SlotValue::dontcare();
  const StateGraph g = build_state_graph(s, schema);
  CHECK(g.empty());
  CHECK(g.fusion_targets.empty());
  CHECK(g.edge_count() == 0);
  CHECK_THROWS_AS(build_state_graph(DialogueState::empty(3), schema), ValidationError);
}

TEST_CASE("builder matches the brute-force reference on random states") {
  const auto start = std::chrono::steady_clock::now();
  for (const Schema& schema : {default_schema(), full_scale_schema()}) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    std::vector<std::size_t> positions(schema.pair_count());
    for (std::size_t j = 0; j < positions.size(); ++j) positions[j] = 3 * j + 7;
    for (int i = 0; i < 10000; ++i) {
      const DialogueState s = random_state(schema, rng, p(rng), 0.2 * p(rng));
      const StateGraph g = build_state_graph(s, schema, positions);
      Reference expected = reference_graph(s, schema);
      std::set<std::pair<std::size_t, std::size_t>> fusion;
      for (const auto& [j, d] : expected.fusion) fusion.insert({positions[j], d});
      expected.fusion = fusion;
      REQUIRE(as_reference(g, schema) == expected);
      const std::size_t k = expected.domains.size();
      CHECK(g.cooccurrence_edges.size() == k * (k - (k > 0 ? 1 : 0)) / 2);
      for (const auto& ph : g.placeholders) CHECK(ph.position == positions[ph.pair]);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 30.0);
}

TEST_CASE("one identity layer reduces to the message-passing formula") {
  const Schema schema = default_schema();
  const Index d = 6;
  std::mt19937_64 rng(21);
  const DialogueState s =
      state_of(schema, {{"hotel", "name", SlotValue::text("acorn house")},
                        {"hotel", "stars", SlotValue::text("4")},
                        {"train", "day", SlotValue::text("monday")},
                        {"taxi", "arriveby", SlotValue::text("10:00")}});
  const StateGraph g = build_state_graph(s, schema);
  const GraphEmbeddings emb = random_embeddings(schema, d, 1, rng);
  const Matrix attn = random_matrix(static_cast<Index>(schema.pair_count()), d, rng);

  for (auto act : {GcnActivation::kIdentity, GcnActivation::kRelu}) {
    const RgcnOutput out = rgcn_update(g, Tensor::constant(attn), emb, {act, false});
    REQUIRE(out.domains.rows() == 3);
    const auto& L = emb.layers[0];
    for (std::size_t n = 0; n < g.domain_nodes.size(); ++n) {
      const std::size_t dom = g.domain_nodes[n];
      Matrix expected = (emb.domain.value().row(dom) - L.self_loop.value()) * L.w_self.value();
      for (std::size_t j = 0; j < schema.pair_count(); ++j) {
        if (schema.pair(j).domain_index != dom || !s[j].is_text()) continue;
        expected += (attn.row(j) - L.slot_edge.value().row(schema.pair(j).slot_name_index)) *
                    L.w_out.value();
      }
      for (std::size_t other : g.domain_nodes) {
        if (other == dom) continue;
        expected += (emb.domain.value().row(other) - L.cooccur.value()) *
                    (L.w_in.value() + L.w_out.value());
      }
      if (act == GcnActivation::kRelu) expected = expected.cwiseMax(0.0);
      CHECK((out.domains.value().row(n) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    // G' lists domains, then placeholders (untouched when they are not updated).
    CHECK(out.nodes.rows() == 7);
    CHECK(out.nodes.value().row(3) == attn.row(*schema.pair_index("hotel", "name")));
  }
}

TEST_CASE("empty graph yields no GCN output") {
  const Schema schema = default_schema();
  std::mt19937_64 rng(3);
  const StateGraph g = build_state_graph(DialogueState::empty(schema.pair_count()), schema);
  const RgcnOutput out = rgcn_update(g, Tensor::constant(random_matrix(12, 4, rng)),
                                     random_embeddings(schema, 4, 2, rng));
  CHECK_FALSE(out.domains.defined());
  CHECK_FALSE(out.nodes.defined());
}

TEST_CASE("rgcn_update gradients match finite differences") {
  const Schema schema = default_schema();
  const Index d = 4;
  std::mt19937_64 rng(8);
  const DialogueState s =
      state_of(schema, {{"hotel", "name", SlotValue::text("acorn house")},
                        {"restaurant", "name", SlotValue::text("golden wok")},
                        {"restaurant", "food", SlotValue::text("italian")},
                        {"taxi", "arriveby", SlotValue::text("10:00")}});
  const StateGraph g = build_state_graph(s, schema);
  const GraphEmbeddings base = random_embeddings(schema, d, 2, rng);
  std::vector<Matrix> inputs = {random_matrix(12, d, rng), base.domain.value()};
  for (const auto& l : base.layers) {
    for (const Tensor* t : {&l.w_self, &l.w_in, &l.w_out, &l.self_loop, &l.cooccur, &l.slot_edge}) {
      inputs.push_back(t->value());
    }
  }
  for (bool update_placeholders : {false, true}) {
    auto fn = [&](const std::vector<Tensor>& x) {
      GraphEmbeddings e;
      e.domain = x[1];
      for (std::size_t l = 0; l < 2; ++l) {
        const std::size_t o = 2 + 6 * l;
        e.layers.push_back({x[o], x[o + 1], x[o + 2], x[o + 3], x[o + 4], x[o + 5]});
      }
      return rgcn_update(g, x[0], e, {GcnActivation::kIdentity, update_placeholders}).nodes;
    };
    CHECK(testsupport::op_gradient_error(fn, inputs) < 1e-5);
  }
}

TEST_CASE("fusion") {
  const Schema schema = default_schema();
  const Index d = 8;
  std::mt19937_64 rng(4);
  const DialogueState s = state_of(schema, {{"train", "day", SlotValue::text("monday")},
                                            {"taxi", "arriveby", SlotValue::text("10:00")}});
  const StateGraph g = build_state_graph(s, schema);
  const Matrix attn = random_matrix(20, d, rng);
  const Matrix domains = random_matrix(2, d, rng);
  std::set<Index> targets;
  for (const auto& t : g.fusion_targets) targets.insert(static_cast<Index>(t.position));
  REQUIRE(targets.size() == 5);

  SUBCASE("rows outside the targets pass through bit-for-bit") {
    const Tensor out = fuse(Tensor::constant(attn), g, Tensor::constant(domains),
                            fusion_params(d, 1.0, 0.0, rng));
    for (Index r = 0; r < attn.rows(); ++r) {
      if (!targets.count(r)) CHECK(out.value().row(r) == attn.row(r));
    }
  }
  SUBCASE("an empty graph returns the input tensor itself") {
    const StateGraph empty = build_state_graph(DialogueState::empty(schema.pair_count()), schema);
    const Tensor in = Tensor::constant(attn);
    const Tensor out = fuse(in, empty, Tensor(), fusion_params(d, 1.0, 0.0, rng));
    CHECK(&out.value() == &in.value());
  }
  SUBCASE("a saturated gate keeps the attention output") {
    const Tensor out = fuse(Tensor::constant(attn), g, Tensor::constant(domains),
                            fusion_params(d, 0.0, 60.0, rng));
    const Matrix expected = layer_norm_rows(attn);
    for (Index r : targets) CHECK((out.value().row(r) - expected.row(r)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("a closed gate gives every slot of a domain the same graph vector") {
    const Tensor out = fuse(Tensor::constant(attn), g, Tensor::constant(domains),
                            fusion_params(d, 0.0, -60.0, rng));
    const Matrix expected = layer_norm_rows(domains);
    for (const auto& t : g.fusion_targets) {
      const Index r = static_cast<Index>(t.position);
      const Index n = static_cast<Index>(t.domain_node);
      CHECK((out.value().row(r) - expected.row(n)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("gradients") {
    const FusionParams p = fusion_params(d, 1.0, 0.2, rng);
    auto fn = [&](const std::vector<Tensor>& x) {
      return fuse(x[0], g, x[1], {x[2], x[3], x[4], x[5]});
    };
    std::vector<Matrix> in = {attn, domains, p.w_beta.value(), p.b_beta.value(),
                              random_matrix(1, d, rng), random_matrix(1, d, rng)};
    CHECK(testsupport::op_gradient_error(fn, in) < 1e-5);
  }
  SUBCASE("mismatched domain representations") {
    CHECK_THROWS_AS(fuse(Tensor::constant(attn), g, Tensor::constant(random_matrix(3, d, rng)),
                         fusion_params(d, 1.0, 0.0, rng)),
                    ShapeError);
  }
}

TEST_CASE("graph attention") {
  std::mt19937_64 rng(6);
  const Matrix q = random_matrix(1, 5, rng);
  SUBCASE("one node is returned as is") {
    const Matrix node = random_matrix(1, 5, rng);
    const Tensor out = graph_attention(Tensor::constant(q), Tensor::constant(node));
    CHECK((out.value() - node).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("no nodes gives zeros") {
    const Tensor out = graph_attention(Tensor::constant(q), Tensor());
    CHECK(out.rows() == 1);
    CHECK(out.cols() == 5);
    CHECK(out.value().isZero());
  }
  SUBCASE("weights are the scaled dot-product softmax") {
    const Matrix nodes = random_matrix(4, 5, rng);
    Eigen::VectorXd logits = (nodes * q.transpose()) / std::sqrt(5.0);
    Eigen::VectorXd w = (logits.array() - logits.maxCoeff()).exp();
    w /= w.sum();
    const Matrix expected = w.transpose() * nodes;
    const Tensor out = graph_attention(Tensor::constant(q), Tensor::constant(nodes));
    CHECK((out.value() - expected).cwiseAbs().maxCoeff() < 1e-14);
    auto fn = [](const std::vector<Tensor>& x) { return graph_attention(x[0], x[1]); };
    CHECK(testsupport::op_gradient_error(fn, {q, nodes}) < 1e-5);
  }
}

TEST_CASE("graph statistics on a hand-built fixture") {
  const Schema schema = default_schema();
  const DialogueState empty = DialogueState::empty(schema.pair_count());
  const auto acorn = SlotValue::text("acorn house");
  std::vector<StateTransition> fixture = {
      // Nothing before the first turn; the new name is not in the state yet.
      {empty, state_of(schema, {{"hotel", "name", acorn}})},
      // One domain, two values; the taxi pickup reuses the hotel name.
      {state_of(schema, {{"hotel", "name", acorn}, {"hotel", "area", SlotValue::text("north")}}),
       state_of(schema, {{"hotel", "name", acorn},
                         {"hotel", "area", SlotValue::text("north")},
                         {"taxi", "departure", acorn}})},
      // Three domains, four values sharing three slot labels; DONTCARE adds nothing.
      {state_of(schema, {{"hotel", "name", acorn},
                         {"restaurant", "name", SlotValue::text("golden wok")},
                         {"restaurant", "food", SlotValue::text("italian")},
                         {"train", "day", SlotValue::text("monday")},
                         {"taxi", "departure", SlotValue::dontcare()}}),
       state_of(schema, {{"hotel", "name", acorn},
                         {"restaurant", "name", SlotValue::text("golden wok")},
                         {"restaurant", "food", SlotValue::text("chinese")},
                         {"train", "day", SlotValue::text("monday")},
                         {"taxi", "departure", SlotValue::dontcare()}})},
  };
  const GraphStats s = graph_stats(fixture, schema);
  CHECK(s.graphs == 3);
  CHECK(s.edges == (0.0 + 2.0 + 7.0) / 3.0);
  CHECK(s.edge_types == (0.0 + 2.0 + 4.0) / 3.0);
  CHECK(s.nodes == (0.0 + 3.0 + 7.0) / 3.0);
  CHECK(s.domains == (0.0 + 1.0 + 3.0) / 3.0);
  CHECK(s.values == (0.0 + 2.0 + 4.0) / 3.0);
  CHECK(s.at_least_two_domains == 1.0 / 3.0);
  CHECK(s.at_least_three_domains == 1.0 / 3.0);
  CHECK(s.update_transitions == 3);
  CHECK(s.update_values_in_prev_state == 1.0 / 3.0);

  const std::string csv = graph_stats_csv({{"test", s}});
  for (const char* label : {"# edges", "# edge types", "# nodes", "# domains", "# values",
                            ">=2 domains", ">=3 domains", "in dialog state"}) {
    CHECK(csv.find(label) != std::string::npos);
  }
  CHECK(graph_stats({}, schema).graphs == 0);
}

TEST_CASE("corpus transitions start from the empty state") {
  const Schema schema = default_schema();
  const auto corpus = generate_corpus(schema, 5, 4, 2);
  const auto tr = corpus_transitions(corpus, schema.pair_count());
  std::size_t turns = 0;
  for (const auto& d : corpus) turns += d.turns.size();
  REQUIRE(tr.size() == turns);
  CHECK(tr[0].prev == DialogueState::empty(schema.pair_count()));
  CHECK(tr[1].prev == corpus[0].turns[0].gold_state);
}
