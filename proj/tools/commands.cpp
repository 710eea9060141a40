#include "commands.hpp"

#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/model.hpp"
#include "graphdst/numerics/ops.hpp"
#include "graphdst/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace gdst::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for bad command lines and unusable paths; maps to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

void require_file(const std::string& flag, const std::string& path) {
  if (path.empty()) throw InputError(flag + " is required");
  if (!fs::is_regular_file(path)) throw InputError(flag + ": no such file '" + path + "'");
}

void require_writable_parent(const std::string& flag, const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && fs::exists(parent) && !fs::is_directory(parent)) {
    throw InputError(flag + ": '" + parent.string() + "' is not a directory");
  }
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

bool parse_bool(const std::string& flag, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError(flag + " expects true or false, got '" + v + "'");
}

/// Architecture flags shared by train and gradcheck.
struct ModelFlags {
  std::string config_path;
  bool no_graph = false;
  std::optional<int> graph_blocks;
  std::optional<int> gcn_layers;
  std::string graph_query;
  bool update_placeholders = false;
  std::optional<int> d_h;
  std::optional<int> n_layers;
  std::optional<int> n_heads;
  std::optional<double> dropout;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with ModelConfig fields");
    cmd->add_flag("--no-graph", no_graph, "Disable the state graph path");
    cmd->add_option("--graph-blocks", graph_blocks, "Graph-enhanced encoder blocks (1 or 2)");
    cmd->add_option("--gcn-layers", gcn_layers, "Relational GCN layers (1 or 2)");
    cmd->add_option("--graph-query", graph_query, "Query of the graph summary: cls or slot");
    cmd->add_flag("--update-placeholders", update_placeholders,
                  "Let the GCN rewrite value placeholders");
    cmd->add_option("--d-h", d_h, "Hidden size");
    cmd->add_option("--layers", n_layers, "Encoder blocks");
    cmd->add_option("--heads", n_heads, "Attention heads");
    cmd->add_option("--dropout", dropout, "Dropout rate");
  }

  void check() const {
    if (!config_path.empty()) require_file("--config", config_path);
  }

  ModelConfig build() const {
    ModelConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InputError("--config: " + std::string(e.what()));
      }
      c = ModelConfig::from_json(j);
    }
    if (no_graph) c.graph_enabled = false;
    if (graph_blocks) c.n_graph_blocks = *graph_blocks;
    if (gcn_layers) c.n_gcn_layers = *gcn_layers;
    if (!graph_query.empty()) c.graph_query = graph_query_from_string(graph_query);
    if (update_placeholders) c.update_placeholders = true;
    if (d_h) c.d_h = *d_h;
    if (n_layers) c.n_layers = *n_layers;
    if (n_heads) c.n_heads = *n_heads;
    if (dropout) c.dropout = *dropout;
    c.validate();
    return c;
  }
};

// ---------------------------------------------------------------- schema

struct SchemaCmd {
  std::string preset = "default";
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "default, full or linked");
    cmd->add_option("--out", out, "Output JSON path")->required();
  }

  void run(std::ostream& os) const {
    require_writable_parent("--out", out);
    const Schema schema = preset_schema(preset);
    ensure_dir(fs::path(out).parent_path());
    save_schema(schema, out);
    os << "wrote schema with " << schema.domains().size() << " domains and "
       << schema.pair_count() << " slot pairs to " << out << "\n";
  }
};

// ---------------------------------------------------------------- generate

struct GenerateCmd {
  std::string schema_path;
  std::string out;
  std::size_t dialogues = 100;
  std::size_t max_turns = 6;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "Schema JSON")->required();
    cmd->add_option("--out", out, "Output JSONL path")->required();
    cmd->add_option("--dialogues", dialogues, "Number of dialogues");
    cmd->add_option("--max-turns", max_turns, "Maximum turns per dialogue");
    cmd->add_option("--seed", seed, "Random seed")->required();
  }

  void run(std::ostream& os) const {
    require_file("--schema", schema_path);
    require_writable_parent("--out", out);
    const Schema schema = load_schema(schema_path);
    const auto corpus = generate_corpus(schema, dialogues, max_turns, *seed);
    ensure_dir(fs::path(out).parent_path());
    save_corpus(out, corpus, schema);
    std::size_t turns = 0;
    for (const auto& d : corpus) turns += d.turns.size();
    os << "wrote " << corpus.size() << " dialogues (" << turns << " turns) to " << out << "\n";
  }
};

// ---------------------------------------------------------------- train

struct TrainCmd {
  std::string schema_path;
  std::string train_path;
  std::string valid_path;
  std::string out_dir;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  TrainConfig tc;
  std::string use_predicted_prev = "true";
  ModelFlags model;

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "Schema JSON")->required();
    cmd->add_option("--train", train_path, "Training corpus (JSONL)")->required();
    cmd->add_option("--valid", valid_path, "Validation corpus (JSONL)");
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--checkpoint", checkpoint, "Checkpoint path (default <out>/checkpoint.json)");
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--epochs", tc.epochs, "Training epochs");
    cmd->add_option("--batch-size", tc.batch_size, "Turns per batch");
    cmd->add_option("--lr-enc", tc.lr_encoder, "Encoder learning rate");
    cmd->add_option("--lr-dec", tc.lr_decoder, "Decoder learning rate");
    cmd->add_option("--lr-gcn", tc.lr_graph, "GCN learning rate");
    cmd->add_option("--warmup", tc.warmup, "Warmup proportion (encoder and decoder)");
    cmd->add_option("--eval-every", tc.eval_every, "Validate every N epochs (0 = never)");
    cmd->add_option("--use-predicted-prev", use_predicted_prev,
                    "Validation feeds back predicted states (true/false)");
    model.attach(cmd);
  }

  void run(std::ostream& os) const {
    require_file("--schema", schema_path);
    require_file("--train", train_path);
    if (!valid_path.empty()) require_file("--valid", valid_path);
    model.check();
    const fs::path ckpt = checkpoint.empty() ? fs::path(out_dir) / "checkpoint.json" : fs::path(checkpoint);
    require_writable_parent("--checkpoint", ckpt);
    TrainConfig config = tc;
    config.seed = *seed;
    config.eval_predicted_prev = parse_bool("--use-predicted-prev", use_predicted_prev);

    const Schema schema = load_schema(schema_path);
    const auto train_set = load_corpus(train_path, schema);
    const auto valid_set =
        valid_path.empty() ? std::vector<Dialogue>{} : load_corpus(valid_path, schema);
    ModelConfig mc = model.build();
    GraphDst dst(mc, schema, build_vocab(train_set, schema), *seed);
    ensure_dir(out_dir);
    ensure_dir(ckpt.parent_path());

    os << "training on " << train_set.size() << " dialogues, " << dst.params().scalar_count()
       << " parameters\n";
    std::vector<EpochLog> log;
    try {
      log = train(dst, train_set, valid_set, config, [&](const EpochLog& e) {
        os << "epoch " << e.epoch << " op " << std::setprecision(6) << e.op_loss << " gen "
           << e.gen_loss;
        if (e.valid_joint) os << " valid joint " << *e.valid_joint;
        os << "\n" << std::flush;
      });
    } catch (const TrainingDiverged& e) {
      write_file_atomic(fs::path(out_dir) / "diverged.txt", std::string(e.what()) + "\n");
      throw;
    }
    save_checkpoint(dst, ckpt);
    write_file_atomic(fs::path(out_dir) / "train_log.csv", training_log_csv(log));
    os << "wrote " << ckpt.string() << "\n";
  }
};

// ---------------------------------------------------------------- eval

struct EvalFlags {
  std::string schema_path;
  std::string checkpoint;
  bool no_graph = false;
  std::string graph_query;
  std::string use_predicted_prev = "true";

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "Schema JSON")->required();
    cmd->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
    cmd->add_flag("--no-graph", no_graph, "Run without the state graph path");
    cmd->add_option("--graph-query", graph_query, "Override the graph summary query");
    cmd->add_option("--use-predicted-prev", use_predicted_prev,
                    "Feed back predicted states (true/false)");
  }

  void check() const {
    require_file("--schema", schema_path);
    require_file("--checkpoint", checkpoint);
  }

  GraphDst load(const Schema& schema) const {
    GraphDst model = load_checkpoint(checkpoint, schema);
    if (no_graph) model.set_graph_enabled(false);
    if (!graph_query.empty()) model.set_graph_query(graph_query_from_string(graph_query));
    return model;
  }
};

struct EvalCmd {
  EvalFlags flags;
  std::string test_path;
  std::string out_dir;
  int latency_repeats = 3;
  unsigned threads = 1;

  void attach(CLI::App* cmd) {
    flags.attach(cmd);
    cmd->add_option("--test", test_path, "Corpus to evaluate (JSONL)")->required();
    cmd->add_option("--out", out_dir, "Directory for metrics.json and latency.json");
    cmd->add_option("--latency-repeats", latency_repeats, "Timing repeats (0 = skip)");
    cmd->add_option("--threads", threads, "Worker threads for accuracy evaluation");
  }

  void run(std::ostream& os) const {
    flags.check();
    require_file("--test", test_path);
    if (latency_repeats < 0) throw InputError("--latency-repeats must be nonnegative");
    const bool predicted = parse_bool("--use-predicted-prev", flags.use_predicted_prev);
    const Schema schema = load_schema(flags.schema_path);
    const GraphDst model = flags.load(schema);
    const auto corpus = load_corpus(test_path, schema);

    const AccuracyReport acc = evaluate_corpus(model, corpus, predicted, std::max(1u, threads));
    const auto transitions = corpus_transitions(corpus, schema.pair_count());
    nlohmann::ordered_json metrics;
    metrics["dialogues"] = corpus.size();
    metrics["turns"] = acc.turns;
    metrics["use_predicted_prev"] = predicted;
    metrics["graph_enabled"] = model.config().graph_enabled;
    metrics["joint_goal_accuracy"] = acc.joint;
    metrics["slot_accuracy"] = acc.slot;
    nlohmann::ordered_json per_domain;
    for (std::size_t d = 0; d < schema.domains().size(); ++d) {
      per_domain[schema.domains()[d]] = acc.per_domain[d];
    }
    metrics["per_domain_joint_accuracy"] = per_domain;
    metrics["graph_stats"] = graph_stats_json(graph_stats(transitions, schema));

    nlohmann::ordered_json latency;
    latency["latency_repeats"] = latency_repeats;
    latency["batch_size"] = 1;
    latency["median_turn_latency_ms"] =
        latency_repeats > 0 ? median_turn_latency_ms(model, corpus, predicted, latency_repeats)
                            : 0.0;

    if (!out_dir.empty()) {
      ensure_dir(out_dir);
      write_file_atomic(fs::path(out_dir) / "metrics.json", dump(metrics));
      write_file_atomic(fs::path(out_dir) / "latency.json", dump(latency));
    }
    nlohmann::ordered_json both = metrics;
    both["latency"] = latency;
    os << dump(both);
  }
};

// ---------------------------------------------------------------- predict

struct PredictCmd {
  EvalFlags flags;
  std::string dialogues_path;
  std::string out;

  void attach(CLI::App* cmd) {
    flags.attach(cmd);
    cmd->add_option("--dialogues,--test", dialogues_path, "Dialogues to track (JSONL)")
        ->required();
    cmd->add_option("--out", out, "Output JSONL path (default: standard output)");
  }

  void run(std::ostream& os) const {
    flags.check();
    require_file("--dialogues", dialogues_path);
    if (!out.empty()) require_writable_parent("--out", out);
    const bool predicted = parse_bool("--use-predicted-prev", flags.use_predicted_prev);
    const Schema schema = load_schema(flags.schema_path);
    const GraphDst model = flags.load(schema);
    const auto corpus = load_corpus(dialogues_path, schema);

    std::ostringstream lines;
    for (const auto& d : corpus) {
      const auto tracked = model.track(d, predicted);
      for (std::size_t t = 0; t < tracked.size(); ++t) {
        nlohmann::ordered_json line;
        line["dialogue_id"] = d.dialogue_id;
        line["turn"] = t;
        nlohmann::ordered_json ops = nlohmann::ordered_json::object();
        nlohmann::ordered_json state = nlohmann::ordered_json::object();
        for (std::size_t j = 0; j < schema.pair_count(); ++j) {
          const auto& op = tracked[t].ops[j];
          ops[schema.pair(j).key()] =
              op.kind == OpKind::kUpdate ? std::string(to_string(op.kind)) + "(" + op.value + ")"
                                         : std::string(to_string(op.kind));
          const SlotValue& v = tracked[t].state[j];
          if (!v.is_null()) state[schema.pair(j).key()] = v.render();
        }
        line["operations"] = std::move(ops);
        line["state"] = std::move(state);
        lines << line.dump() << "\n";
      }
    }
    if (out.empty()) {
      os << lines.str();
    } else {
      ensure_dir(fs::path(out).parent_path());
      write_file_atomic(out, lines.str());
    }
  }
};

// ---------------------------------------------------------------- gradcheck

/// One turn from each of two short dialogues. The first turn's previous state
/// holds at least two domains, so every graph relation carries gradient; the
/// second is the last turn of the shortest other dialogue.
struct ToyBatch {
  std::vector<Dialogue> dialogues;
  std::vector<std::size_t> turns;
};

ToyBatch toy_batch(const Schema& schema, std::size_t max_turns, std::uint64_t seed) {
  const auto pool = generate_corpus(schema, 64, max_turns, seed);
  auto multi_domain_turn = [&](const Dialogue& d) -> std::size_t {
    for (std::size_t t = 1; t < d.turns.size(); ++t) {
      if (build_state_graph(d.turns[t - 1].gold_state, schema).domain_nodes.size() >= 2) return t;
    }
    return 0;
  };
  auto length = [](const Dialogue& d) {
    std::size_t n = 0;
    for (const auto& t : d.turns) n += t.system_utterance.size() + t.user_utterance.size() + 1;
    return n;
  };
  std::size_t first = SIZE_MAX;
  std::size_t second = SIZE_MAX;
  std::size_t best_first = SIZE_MAX;
  std::size_t best_second = SIZE_MAX;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (multi_domain_turn(pool[i]) != 0 && length(pool[i]) < best_first) {
      best_first = length(pool[i]);
      first = i;
    }
  }
  if (first == SIZE_MAX) {
    throw InputError("gradcheck: no toy dialogue reaches two domains; raise --max-turns");
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i != first && pool[i].turns.size() >= 2 && length(pool[i]) < best_second) {
      best_second = length(pool[i]);
      second = i;
    }
  }
  if (second == SIZE_MAX) throw InputError("gradcheck: no second toy dialogue");
  return {{pool[first], pool[second]},
          {multi_domain_turn(pool[first]), pool[second].turns.size() - 1}};
}

struct GradcheckCmd {
  std::string schema_path;
  std::optional<std::uint64_t> seed;
  std::size_t max_turns = 3;
  nn::GradCheckOptions options;
  std::string out;
  std::string fault;
  ModelFlags model;

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "Schema JSON (default: built-in 12-pair schema)");
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--max-turns", max_turns, "Maximum turns of the toy dialogues");
    cmd->add_option("--eps", options.eps, "Finite-difference step");
    cmd->add_option("--tolerance", options.tolerance, "Maximum relative error");
    cmd->add_option("--samples", options.max_samples_per_tensor,
                    "Entries checked per tensor (0 = all)");
    cmd->add_option("--out", out, "Write the report as JSON");
    cmd->add_option("--threads", options.threads, "Worker threads (0 = all hardware threads)");
    cmd->add_option("--inject-fault", fault)->group("");
    model.attach(cmd);
  }

  bool run(std::ostream& os) const {
    if (!schema_path.empty()) require_file("--schema", schema_path);
    model.check();
    if (!out.empty()) require_writable_parent("--out", out);
    if (!(options.eps > 0.0)) throw InputError("--eps must be positive");

    nn::testing::Fault f = nn::testing::Fault::kNone;
    if (!fault.empty()) {
      static const std::map<std::string, nn::testing::Fault> kFaults = {
          {"sigmoid", nn::testing::Fault::kSigmoid}, {"layernorm", nn::testing::Fault::kLayerNorm},
          {"softmax", nn::testing::Fault::kSoftmax}, {"tanh", nn::testing::Fault::kTanh},
          {"gelu", nn::testing::Fault::kGelu},       {"relu", nn::testing::Fault::kRelu}};
      auto it = kFaults.find(fault);
      if (it == kFaults.end()) throw InputError("--inject-fault: unknown rule '" + fault + "'");
      f = it->second;
    }

    const Schema schema = schema_path.empty() ? default_schema() : load_schema(schema_path);
    ModelConfig mc = model.build();
    mc.dropout = 0.0;
    const ToyBatch batch = toy_batch(schema, max_turns, *seed);
    GraphDst dst(mc, schema, build_vocab(batch.dialogues, schema), *seed);
    std::vector<TrainingExample> examples;
    for (std::size_t i = 0; i < batch.dialogues.size(); ++i) {
      const auto& turns = batch.dialogues[i].turns;
      const std::size_t t = batch.turns[i];
      examples.push_back(dst.make_example(&turns[t - 1], turns[t], turns[t - 1].gold_state,
                                          turns[t].gold_state));
    }

    nn::GradCheckOptions opts = options;
    opts.seed = *seed;
    nn::testing::inject_backward_fault(f);
    nn::GradCheckReport report;
    try {
      report = check_model_gradients(dst, std::span<const TrainingExample>(examples), opts);
    } catch (...) {
      nn::testing::inject_backward_fault(nn::testing::Fault::kNone);
      throw;
    }
    nn::testing::inject_backward_fault(nn::testing::Fault::kNone);

    os << report.summary();
    if (!out.empty()) {
      nlohmann::ordered_json j;
      j["passed"] = report.passed();
      j["tolerance"] = report.tolerance;
      j["max_rel_error"] = report.max_rel_error;
      nlohmann::ordered_json groups;
      for (const auto& [g, e] : report.group_max()) groups[std::string(nn::to_string(g))] = e;
      j["group_max_rel_error"] = groups;
      nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
      for (const auto& t : report.tensors) {
        tensors.push_back({{"name", t.name},
                           {"group", nn::to_string(t.group)},
                           {"checked", t.checked},
                           {"kinked", t.kinked},
                           {"max_rel_error", t.max_rel_error},
                           {"worst_index", t.worst_index},
                           {"analytic", t.analytic},
                           {"numeric", t.numeric}});
      }
      j["tensors"] = tensors;
      ensure_dir(fs::path(out).parent_path());
      write_file_atomic(out, dump(j));
    }
    return report.passed();
  }
};

// ---------------------------------------------------------------- stats

struct StatsCmd {
  std::string schema_path;
  std::string train_path, valid_path, test_path;
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "Schema JSON")->required();
    cmd->add_option("--train", train_path, "Training corpus");
    cmd->add_option("--valid", valid_path, "Validation corpus");
    cmd->add_option("--test", test_path, "Test corpus");
    cmd->add_option("--out", out, "Output CSV path (default: standard output)");
  }

  void run(std::ostream& os) const {
    require_file("--schema", schema_path);
    std::vector<std::pair<std::string, std::string>> splits;
    for (const auto& [name, path] : {std::pair<std::string, std::string>{"train", train_path},
                                     {"valid", valid_path},
                                     {"test", test_path}}) {
      if (path.empty()) continue;
      require_file("--" + name, path);
      splits.emplace_back(name, path);
    }
    if (splits.empty()) throw InputError("stats needs at least one of --train, --valid, --test");
    if (!out.empty()) require_writable_parent("--out", out);
    const Schema schema = load_schema(schema_path);
    std::vector<std::pair<std::string, GraphStats>> rows;
    for (const auto& [name, path] : splits) {
      const auto corpus = load_corpus(path, schema);
      rows.emplace_back(name, graph_stats(corpus_transitions(corpus, schema.pair_count()), schema));
    }
    const std::string csv = graph_stats_csv(rows);
    if (out.empty()) {
      os << csv;
    } else {
      ensure_dir(fs::path(out).parent_path());
      write_file_atomic(out, csv);
    }
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dialogue state tracking with a state-graph-enhanced encoder", "graphdst"};
  app.require_subcommand(1);
  SchemaCmd schema_cmd;
  GenerateCmd generate_cmd;
  TrainCmd train_cmd;
  EvalCmd eval_cmd;
  PredictCmd predict_cmd;
  GradcheckCmd gradcheck_cmd;
  StatsCmd stats_cmd;
  auto* schema_app = app.add_subcommand("schema", "Write a built-in schema");
  auto* generate_app = app.add_subcommand("generate", "Synthesise a corpus");
  auto* train_app = app.add_subcommand("train", "Train a tracker");
  auto* eval_app = app.add_subcommand("eval", "Evaluate a checkpoint");
  auto* predict_app = app.add_subcommand("predict", "Dump per-turn predictions");
  auto* gradcheck_app = app.add_subcommand("gradcheck", "Check gradients on a toy batch");
  auto* stats_app = app.add_subcommand("stats", "State graph statistics per split");
  schema_cmd.attach(schema_app);
  generate_cmd.attach(generate_app);
  train_cmd.attach(train_app);
  eval_cmd.attach(eval_app);
  predict_cmd.attach(predict_app);
  gradcheck_cmd.attach(gradcheck_app);
  stats_cmd.attach(stats_app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (schema_app->parsed()) schema_cmd.run(out);
    if (generate_app->parsed()) generate_cmd.run(out);
    if (train_app->parsed()) train_cmd.run(out);
    if (eval_app->parsed()) eval_cmd.run(out);
    if (predict_app->parsed()) predict_cmd.run(out);
    if (stats_app->parsed()) stats_cmd.run(out);
    if (gradcheck_app->parsed() && !gradcheck_cmd.run(out)) {
      err << "gradient check failed\n";
      return kCheckFailed;
    }
  } catch (const CheckpointError& e) {
    err << "checkpoint mismatch: " << e.what() << "\n";
    return kCheckpointMismatch;
  } catch (const TrainingDiverged& e) {
    err << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace gdst::cli
