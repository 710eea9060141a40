// Python bindings. Corpora and states cross the boundary as JSON-shaped
// Python objects; the pure-Python wrapper in graphdst/__init__.py adds the
// conversions.

#include "../tools/commands.hpp"
#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/graph.hpp"
#include "graphdst/model.hpp"
#include "graphdst/state.hpp"
#include "graphdst/trainer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace gdst;

namespace {

using StateDict = std::map<std::string, std::string>;

std::size_t pair_of(const Schema& schema, const std::string& key) {
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    if (schema.pair(j).key() == key) return j;
  }
  throw ValidationError("unknown (domain, slot) pair '" + key + "'");
}

DialogueState to_state(const Schema& schema, const StateDict& d) {
  DialogueState s = DialogueState::empty(schema.pair_count());
  for (const auto& [key, value] : d) s[pair_of(schema, key)] = SlotValue::parse(value);
  return s;
}

StateDict from_state(const Schema& schema, const DialogueState& s) {
  StateDict d;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!s[j].is_null()) d[schema.pair(j).key()] = s[j].render();
  }
  return d;
}

std::string render_op(const StateOperation& op) {
  const std::string kind(to_string(op.kind));
  return op.kind == OpKind::kUpdate ? kind + "(" + op.value + ")" : kind;
}

std::vector<Dialogue> parse_jsonl(const Schema& schema, const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in, schema);
}

std::string to_jsonl(const Schema& schema, const std::vector<Dialogue>& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus, schema);
  return out.str();
}

py::dict accuracy_dict(const Schema& schema, const AccuracyReport& r) {
  py::dict d;
  d["turns"] = r.turns;
  d["joint_goal_accuracy"] = r.joint;
  d["slot_accuracy"] = r.slot;
  py::dict per_domain;
  for (std::size_t i = 0; i < r.per_domain.size(); ++i) per_domain[py::str(schema.domains()[i])] = r.per_domain[i];
  d["per_domain_joint_accuracy"] = per_domain;
  return d;
}

}  // namespace

PYBIND11_MODULE(_graphdst, m) {
  m.doc() = "Graph-enhanced dialogue state tracking";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_ValueError);

  py::class_<Schema>(m, "Schema")
      .def_static("preset", &preset_schema, py::arg("name") = "default")
      .def_static("load", [](const std::string& path) { return load_schema(path); })
      .def_static("from_json",
                  [](const std::string& text) { return Schema::from_json(nlohmann::json::parse(text)); })
      .def("to_json", [](const Schema& s) { return s.to_json().dump(); })
      .def("save", [](const Schema& s, const std::string& path) { save_schema(s, path); })
      .def_property_readonly("domains", &Schema::domains)
      .def_property_readonly("pair_keys", [](const Schema& s) {
        std::vector<std::string> keys;
        for (const auto& p : s.pairs()) keys.push_back(p.key());
        return keys;
      });

  m.def(
      "generate_corpus_jsonl",
      [](const Schema& schema, std::size_t n, std::size_t max_turns, std::uint64_t seed) {
        return to_jsonl(schema, generate_corpus(schema, n, max_turns, seed));
      },
      py::arg("schema"), py::arg("n_dialogues"), py::arg("max_turns"), py::arg("seed"));

  m.def(
      "derive_operations",
      [](const Schema& schema, const StateDict& prev, const StateDict& gold) {
        const auto ops = derive_operations(to_state(schema, prev), to_state(schema, gold));
        std::map<std::string, std::string> out;
        for (std::size_t j = 0; j < ops.size(); ++j) out[schema.pair(j).key()] = render_op(ops[j]);
        return out;
      },
      py::arg("schema"), py::arg("prev"), py::arg("gold"));

  m.def(
      "apply_derived",
      [](const Schema& schema, const StateDict& prev, const StateDict& gold) {
        const DialogueState p = to_state(schema, prev);
        return from_state(schema, apply_operations(p, derive_operations(p, to_state(schema, gold))));
      },
      py::arg("schema"), py::arg("prev"), py::arg("gold"));

  m.def(
      "state_graph",
      [](const Schema& schema, const StateDict& prev) {
        const StateGraph g = build_state_graph(to_state(schema, prev), schema);
        py::dict d;
        std::vector<std::string> domains;
        for (auto i : g.domain_nodes) domains.push_back(schema.domains()[i]);
        std::vector<std::string> values;
        for (const auto& ph : g.placeholders) values.push_back(schema.pair(ph.pair).key());
        d["domains"] = domains;
        d["values"] = values;
        d["nodes"] = g.node_count();
        d["edges"] = g.edge_count();
        d["edge_types"] = g.edge_type_count();
        return d;
      },
      py::arg("schema"), py::arg("prev"));

  m.def(
      "graph_stats_json",
      [](const Schema& schema, const std::string& jsonl) {
        const auto corpus = parse_jsonl(schema, jsonl);
        const auto tr = corpus_transitions(corpus, schema.pair_count());
        return graph_stats_json(graph_stats(tr, schema)).dump();
      },
      py::arg("schema"), py::arg("corpus_jsonl"));

  py::class_<GraphDst>(m, "Tracker")
      .def(py::init([](const Schema& schema, const std::string& vocab_jsonl,
                       const std::string& config_json, std::uint64_t seed) {
             const auto corpus = parse_jsonl(schema, vocab_jsonl);
             const ModelConfig c = config_json.empty()
                                       ? ModelConfig{}
                                       : ModelConfig::from_json(nlohmann::json::parse(config_json));
             return GraphDst(c, schema, build_vocab(corpus, schema), seed);
           }),
           py::arg("schema"), py::arg("corpus_jsonl"), py::arg("config_json") = "",
           py::arg("seed") = 0)
      .def_static(
          "load", [](const std::string& path, const Schema& schema) { return load_checkpoint(path, schema); },
          py::arg("path"), py::arg("schema"))
      .def("save", [](const GraphDst& g, const std::string& path) { save_checkpoint(g, path); })
      .def("checkpoint_json", &checkpoint_json)
      .def("config_json", [](const GraphDst& g) { return g.config().to_json().dump(); })
      .def_property_readonly("parameter_count", [](const GraphDst& g) { return g.params().scalar_count(); })
      .def("set_graph_enabled", &GraphDst::set_graph_enabled)
      .def(
          "train",
          [](GraphDst& g, const std::string& train_jsonl, const std::string& valid_jsonl, int epochs,
             std::size_t batch_size, std::uint64_t seed, int eval_every) {
            const auto train_set = parse_jsonl(g.schema(), train_jsonl);
            const auto valid_set = parse_jsonl(g.schema(), valid_jsonl);
            TrainConfig tc;
            tc.epochs = epochs;
            tc.batch_size = batch_size;
            tc.seed = seed;
            tc.eval_every = eval_every;
            std::vector<EpochLog> log;
            {
              py::gil_scoped_release release;
              log = train(g, train_set, valid_set, tc);
            }
            py::list out;
            for (const auto& e : log) {
              py::dict d;
              d["epoch"] = e.epoch;
              d["op_loss"] = e.op_loss;
              d["gen_loss"] = e.gen_loss;
              d["valid_joint"] = e.valid_joint ? py::cast(*e.valid_joint) : py::none();
              out.append(d);
            }
            return out;
          },
          py::arg("train_jsonl"), py::arg("valid_jsonl") = "", py::arg("epochs") = 30,
          py::arg("batch_size") = 8, py::arg("seed") = 0, py::arg("eval_every") = 0)
      .def(
          "evaluate",
          [](const GraphDst& g, const std::string& jsonl, bool use_predicted_prev) {
            const auto corpus = parse_jsonl(g.schema(), jsonl);
            AccuracyReport r;
            {
              py::gil_scoped_release release;
              r = evaluate_corpus(g, corpus, use_predicted_prev);
            }
            return accuracy_dict(g.schema(), r);
          },
          py::arg("corpus_jsonl"), py::arg("use_predicted_prev") = true)
      .def(
          "track",
          [](const GraphDst& g, const std::string& dialogue_json, bool use_predicted_prev) {
            const Dialogue d = dialogue_from_json(nlohmann::json::parse(dialogue_json), g.schema());
            py::list out;
            for (const auto& t : g.track(d, use_predicted_prev)) {
              py::dict turn;
              std::map<std::string, std::string> ops;
              for (std::size_t j = 0; j < t.ops.size(); ++j) ops[g.schema().pair(j).key()] = render_op(t.ops[j]);
              turn["operations"] = ops;
              turn["state"] = from_state(g.schema(), t.state);
              out.append(turn);
            }
            return out;
          },
          py::arg("dialogue_json"), py::arg("use_predicted_prev") = true)
      .def(
          "gradcheck",
          [](GraphDst& g, const std::string& jsonl, std::size_t samples, double eps) {
            const auto batch = parse_jsonl(g.schema(), jsonl);
            nn::GradCheckOptions opts;
            opts.max_samples_per_tensor = samples;
            opts.eps = eps;
            nn::GradCheckReport r;
            {
              py::gil_scoped_release release;
              r = check_model_gradients(g, batch, opts);
            }
            py::dict d;
            d["passed"] = r.passed();
            d["max_rel_error"] = r.max_rel_error;
            d["tensors"] = r.tensors.size();
            return d;
          },
          py::arg("corpus_jsonl"), py::arg("samples") = 20, py::arg("eps") = 3e-5);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
