#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/model.hpp"
#include "graphdst/numerics/layers.hpp"
#include "graphdst/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace gdst;
using nn::Index;
using nn::Matrix;
using nn::Tensor;
namespace fs = std::filesystem;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.d_h = 16;
  c.n_heads = 2;
  c.n_layers = 2;
  c.d_ff = 32;
  c.dropout = 0.0;
  return c;
}

struct Fixture {
  Schema schema = default_schema();
  std::vector<Dialogue> corpus = generate_corpus(schema, 12, 4, 5);
  Vocabulary vocab = build_vocab(corpus, schema);

  GraphDst model(ModelConfig c = small_config(), std::uint64_t seed = 3) const {
    return GraphDst(c, schema, vocab, seed);
  }
};

void set_param(GraphDst& m, const std::string& name, const Matrix& value) {
  m.params()[m.params().id_of(name)].value = value;
}

// Bitwise equality of everything a turn produces.
void require_same_outputs(const GraphDst& a, const GraphDst& b, const Dialogue& d,
                          bool graph_states_only_empty) {
  DialogueState prev = DialogueState::empty(a.schema().pair_count());
  for (std::size_t t = 0; t < d.turns.size(); ++t) {
    if (graph_states_only_empty && t > 0) break;
    const DialogueTurn* prev_turn = t == 0 ? nullptr : &d.turns[t - 1];
    const EncodedInput in = a.serialize(prev_turn, d.turns[t], prev);
    nn::ParamBinder ba(a.params());
    nn::ParamBinder bb(b.params());
    const Encoding ea = a.encode(in, a.graph_for(prev, in), ba);
    const Encoding eb = b.encode(in, b.graph_for(prev, in), bb);
    REQUIRE(ea.hidden.value() == eb.hidden.value());
    REQUIRE(a.operation_logits(ea, ba).value() == b.operation_logits(eb, bb).value());
    for (std::size_t j = 0; j < a.schema().pair_count(); ++j) {
      REQUIRE(a.generate_value(j, ea, in, ba) == b.generate_value(j, eb, in, bb));
    }
    const TrainingExample xa = a.make_example(prev_turn, d.turns[t], prev, d.turns[t].gold_state);
    const TrainingExample xb = b.make_example(prev_turn, d.turns[t], prev, d.turns[t].gold_state);
    REQUIRE(a.example_loss(xa, ba, {12.0, 5.0}).total.item() ==
            b.example_loss(xb, bb, {12.0, 5.0}).total.item());
    prev = d.turns[t].gold_state;
  }
}

}  // namespace

TEST_CASE("constructor validation") {
  Fixture f;
  ModelConfig c = small_config();
  c.n_heads = 3;
  CHECK_THROWS_AS(f.model(c), ValidationError);
  c = small_config();
  c.n_graph_blocks = 3;
  CHECK_THROWS_AS(f.model(c), ValidationError);
}

TEST_CASE("encoder and classifier shapes") {
  Fixture f;
  const GraphDst m = f.model();
  const auto& d = f.corpus[0];
  const EncodedInput in = m.serialize(&d.turns[0], d.turns[1], d.turns[0].gold_state);
  nn::ParamBinder bind(m.params());
  const Encoding enc = m.encode(in, m.graph_for(d.turns[0].gold_state, in), bind);
  CHECK(enc.hidden.rows() == static_cast<Index>(in.size()));
  CHECK(enc.hidden.cols() == 16);
  CHECK(enc.cls.rows() == 1);
  CHECK(enc.slots.rows() == 12);
  CHECK(enc.graph_nodes.defined());
  CHECK(m.operation_logits(enc, bind).rows() == 12);
  CHECK(m.operation_logits(enc, bind).cols() == 4);
}

TEST_CASE("graph ablation is exact") {
  Fixture f;
  ModelConfig plain = small_config();
  plain.graph_enabled = false;
  GraphDst with_graph = f.model();
  const GraphDst without = f.model(plain);
  CHECK_FALSE(without.has_graph_params());

  // Shared tensors do not depend on whether the graph exists.
  for (const auto& p : without.params()) {
    REQUIRE(with_graph.params()[with_graph.params().id_of(p.name)].value == p.value);
  }

  SUBCASE("empty previous states pass straight through") {
    for (const auto& d : f.corpus) require_same_outputs(with_graph, without, d, true);
  }
  SUBCASE("switching the graph off matches a model built without it") {
    with_graph.set_graph_enabled(false);
    for (const auto& d : f.corpus) require_same_outputs(with_graph, without, d, false);
    const AccuracyReport a = evaluate_corpus(with_graph, f.corpus, true);
    const AccuracyReport b = evaluate_corpus(without, f.corpus, true);
    CHECK(a.joint == b.joint);
    CHECK(a.slot == b.slot);
    CHECK(a.per_domain == b.per_domain);
  }
  SUBCASE("a non-empty graph changes the encoding") {
    const auto& d = f.corpus[0];
    const EncodedInput in = with_graph.serialize(&d.turns[0], d.turns[1], d.turns[0].gold_state);
    nn::ParamBinder ba(with_graph.params());
    nn::ParamBinder bb(without.params());
    const Encoding ea = with_graph.encode(in, with_graph.graph_for(d.turns[0].gold_state, in), ba);
    const Encoding eb = without.encode(in, without.graph_for(d.turns[0].gold_state, in), bb);
    CHECK_FALSE(ea.hidden.value() == eb.hidden.value());
  }
}

TEST_CASE("a zero classifier predicts uniformly") {
  Fixture f;
  GraphDst m = f.model();
  set_param(m, "enc.op_classifier.w", Matrix::Zero(16, 4));
  set_param(m, "enc.op_classifier.b", Matrix::Zero(1, 4));
  const auto& d = f.corpus[0];
  // Same state twice: every operation is CARRYOVER and nothing is generated.
  const TrainingExample ex =
      m.make_example(&d.turns[0], d.turns[1], d.turns[0].gold_state, d.turns[0].gold_state);
  REQUIRE(ex.value_targets.empty());
  nn::ParamBinder bind(m.params());
  const LossParts loss = m.example_loss(ex, bind, {12.0, 1.0});
  CHECK(loss.operation.item() == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(loss.generation.item() == 0.0);
  CHECK(loss.total.item() == loss.operation.item());
}

TEST_CASE("training examples") {
  Fixture f;
  const GraphDst m = f.model();
  const auto examples = m.make_examples(f.corpus);
  std::size_t turns = 0;
  for (const auto& d : f.corpus) turns += d.turns.size();
  REQUIRE(examples.size() == turns);
  const auto& d = f.corpus[0];
  const TrainingExample ex =
      m.make_example(nullptr, d.turns[0], DialogueState::empty(12), d.turns[0].gold_state);
  const auto ops = derive_operations(DialogueState::empty(12), d.turns[0].gold_state);
  std::size_t updates = 0;
  for (std::size_t j = 0; j < 12; ++j) {
    CHECK(ex.op_targets[j] == static_cast<Index>(ops[j].kind));
    if (ops[j].kind == OpKind::kUpdate) ++updates;
  }
  REQUIRE(ex.value_targets.size() == updates);
  for (const auto& [pair, ids] : ex.value_targets) {
    CHECK(ids.back() == Vocabulary::kEos);
    std::vector<TokenId> value(ids.begin(), ids.end() - 1);
    CHECK(join_tokens(m.vocab().decode(value)) == ops[pair].value);
  }
  CHECK(ex.graph.empty());
}

TEST_CASE("decoder distributions") {
  Fixture f;
  ModelConfig c = small_config();
  c.init_scale = 0.5;
  GraphDst m = f.model(c, 17);
  const auto& mask = m.generation_mask();
  for (TokenId id : {Vocabulary::kPad, Vocabulary::kCls, Vocabulary::kSep, Vocabulary::kSlot,
                     Vocabulary::kNull, Vocabulary::kDontCare, Vocabulary::kDash}) {
    CHECK(mask[static_cast<std::size_t>(id)] == 0);
  }
  CHECK(mask[Vocabulary::kEos] == 1);

  const auto& d = f.corpus[1];
  const EncodedInput in = m.serialize(&d.turns[0], d.turns[1], d.turns[0].gold_state);
  nn::ParamBinder bind(m.params());
  const Encoding enc = m.encode(in, m.graph_for(d.turns[0].gold_state, in), bind);

  SUBCASE("every step is a mixture of two distributions") {
    for (std::size_t j = 0; j < 12; ++j) {
      DecodeTrace trace;
      m.generate_value(j, enc, in, bind, &trace);
      REQUIRE(!trace.p_final.empty());
      for (std::size_t k = 0; k < trace.p_final.size(); ++k) {
        for (const Matrix* p : {&trace.p_vocab[k], &trace.p_copy[k], &trace.p_positions[k],
                                &trace.p_final[k]}) {
          CHECK(std::abs(p->sum() - 1.0) < 1e-6);
          CHECK(p->minCoeff() >= 0.0);
        }
        const double a = trace.alpha[k];
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        const Matrix mix = a * trace.p_vocab[k] + (1.0 - a) * trace.p_copy[k];
        CHECK((mix - trace.p_final[k]).cwiseAbs().maxCoeff() < 1e-15);
        for (std::size_t v = 0; v < mask.size(); ++v) {
          if (!mask[v]) CHECK(trace.p_final[k](0, static_cast<Index>(v)) == 0.0);
        }
      }
    }
  }
  SUBCASE("a closed gate copies from the input") {
    set_param(m, "dec.copy_gate.b", Matrix::Constant(1, 1, -1000.0));
    nn::ParamBinder b2(m.params());
    DecodeTrace trace;
    m.generate_value(0, enc, in, b2, &trace);
    std::vector<double> expected(m.vocab().size(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      expected[static_cast<std::size_t>(in.token_ids[i])] += trace.p_positions[0](0, static_cast<Index>(i));
    }
    CHECK(trace.alpha[0] == 0.0);
    for (std::size_t v = 0; v < expected.size(); ++v) {
      CHECK(trace.p_final[0](0, static_cast<Index>(v)) == doctest::Approx(expected[v]).epsilon(1e-12));
    }
  }
  SUBCASE("teacher-forced NLL is the sum of target log-probabilities") {
    const std::vector<TokenId> target = {m.vocab().id("acorn"), m.vocab().id("house"),
                                         Vocabulary::kEos};
    DecodeTrace trace;
    const double nll = m.value_nll(3, enc, in, target, bind, &trace).item();
    REQUIRE(trace.p_final.size() == 3);
    double expected = 0.0;
    for (std::size_t k = 0; k < 3; ++k) expected -= std::log(trace.p_final[k](0, target[k]));
    CHECK(nll == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("operation distributions and attention rows") {
    const Matrix logits = m.operation_logits(enc, bind).value();
    for (Index r = 0; r < logits.rows(); ++r) {
      Eigen::RowVectorXd p = (logits.row(r).array() - logits.row(r).maxCoeff()).exp();
      p /= p.sum();
      CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    }
    const auto id = [&](const std::string& n) { return bind(m.params().id_of(n)); };
    const nn::AttentionParams ap{id("enc.layer0.attn.wq"), id("enc.layer0.attn.bq"),
                                 id("enc.layer0.attn.wk"), id("enc.layer0.attn.bk"),
                                 id("enc.layer0.attn.wv"), id("enc.layer0.attn.bv")};
    const auto res = nn::multi_head_attention(enc.hidden, ap, 2);
    for (const auto& w : res.weights) {
      CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
      CHECK(w.minCoeff() >= 0.0);
    }
  }
  SUBCASE("greedy decoding stops within the length budget") {
    for (std::size_t j = 0; j < 12; ++j) {
      const auto ids = m.generate_value(j, enc, in, bind);
      CHECK(ids.size() <= c.max_decode_len);
      for (auto t : ids) {
        CHECK(t != Vocabulary::kEos);
        CHECK(mask[static_cast<std::size_t>(t)] == 1);
      }
    }
  }
}

TEST_CASE("oracle operations track the gold states") {
  Fixture f;
  for (bool predicted_prev : {true, false}) {
    for (const auto& d : f.corpus) {
      const auto turns = track_dialogue(
          d, 12,
          [&](const DialogueTurn*, const DialogueTurn& cur, const DialogueState& prev, std::size_t) {
            return derive_operations(prev, cur.gold_state);
          },
          predicted_prev);
      REQUIRE(turns.size() == d.turns.size());
      for (std::size_t t = 0; t < turns.size(); ++t) CHECK(turns[t].state == d.turns[t].gold_state);
    }
  }
}

TEST_CASE("tracking feeds back its own predictions only when asked") {
  Fixture f;
  const auto& d = f.corpus[0];
  REQUIRE(d.turns.size() >= 2);
  std::vector<DialogueState> seen;
  auto predictor = [&](const DialogueTurn*, const DialogueTurn&, const DialogueState& prev,
                       std::size_t) {
    seen.push_back(prev);
    return OperationMap(12);  // always CARRYOVER
  };
  track_dialogue(d, 12, predictor, true);
  for (const auto& s : seen) CHECK(s == DialogueState::empty(12));
  seen.clear();
  track_dialogue(d, 12, predictor, false);
  CHECK(seen[1] == d.turns[0].gold_state);
}

TEST_CASE("construction and training are deterministic") {
  Fixture f;
  CHECK(checkpoint_json(f.model()) == checkpoint_json(f.model()));
  CHECK_FALSE(checkpoint_json(f.model(small_config(), 3)) ==
              checkpoint_json(f.model(small_config(), 4)));

  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 9;
  tc.eval_every = 1;
  ModelConfig c = small_config();
  c.dropout = 0.1;
  std::vector<Dialogue> train_set(f.corpus.begin(), f.corpus.begin() + 6);
  std::vector<Dialogue> valid_set(f.corpus.begin() + 6, f.corpus.end());
  GraphDst a = f.model(c);
  GraphDst b = f.model(c);
  const auto la = train(a, train_set, valid_set, tc);
  const auto lb = train(b, train_set, valid_set, tc);
  CHECK(training_log_csv(la) == training_log_csv(lb));
  CHECK(checkpoint_json(a) == checkpoint_json(b));
  REQUIRE(la.size() == 2);
  CHECK(la.back().valid_joint.has_value());
  CHECK_FALSE(checkpoint_json(a) == checkpoint_json(f.model(c)));
}

TEST_CASE("training lowers the loss") {
  Fixture f;
  TrainConfig tc;
  tc.epochs = 8;
  tc.seed = 1;
  tc.eval_every = 0;
  GraphDst m = f.model();
  const auto log = train(m, f.corpus, {}, tc);
  REQUIRE(log.size() == 8);
  CHECK(log.back().op_loss < log.front().op_loss);
  CHECK(log.back().gen_loss < log.front().gen_loss);
  CHECK_FALSE(log.back().valid_joint.has_value());
  const std::string csv = training_log_csv(log);
  CHECK(csv.rfind("epoch,op_loss,gen_loss,valid_joint\n", 0) == 0);
}

TEST_CASE("checkpoints") {
  Fixture f;
  const fs::path dir = fs::temp_directory_path() / "graphdst_test_model_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  GraphDst m = f.model();
  TrainConfig tc;
  tc.epochs = 1;
  tc.eval_every = 0;
  train(m, f.corpus, {}, tc);
  const fs::path path = dir / "checkpoint.json";
  save_checkpoint(m, path);

  SUBCASE("round trip") {
    const GraphDst loaded = load_checkpoint(path, f.schema);
    CHECK(checkpoint_json(loaded) == checkpoint_json(m));
    const auto& d = f.corpus[2];
    const auto ta = m.track(d, true);
    const auto tb = loaded.track(d, true);
    for (std::size_t t = 0; t < ta.size(); ++t) {
      CHECK(ta[t].ops == tb[t].ops);
      CHECK(ta[t].state == tb[t].state);
    }
  }
  SUBCASE("a different schema is rejected") {
    CHECK_THROWS_AS(load_checkpoint(path, full_scale_schema()), CheckpointError);
  }
  SUBCASE("damaged files are rejected") {
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.json", f.schema), Error);
    std::ofstream(dir / "bad.json") << "{\"format\": \"something-else\"}";
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.json", f.schema), CheckpointError);
    std::string text = checkpoint_json(m);
    std::ofstream(dir / "cut.json") << text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(load_checkpoint(dir / "cut.json", f.schema), CheckpointError);
  }
  fs::remove_all(dir);
}

TEST_CASE("model gradients on a tiny batch") {
  Fixture f;
  ModelConfig c = small_config();
  c.d_h = 8;
  c.d_ff = 16;
  c.n_gcn_layers = 2;
  c.update_placeholders = true;
  GraphDst m = f.model(c, 2);
  std::vector<Dialogue> batch = {f.corpus[0]};
  nn::GradCheckOptions opts;
  opts.max_samples_per_tensor = 12;
  opts.threads = 1;
  const auto report = check_model_gradients(m, batch, opts);
  INFO(report.summary());
  CHECK(report.passed());
  CHECK(report.tensors.size() == m.params().size());
}
