#pragma once

#include "graphdst/config.hpp"
#include "graphdst/graph.hpp"
#include "graphdst/numerics/params.hpp"
#include "graphdst/state.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <vector>

namespace gdst {

/// Encoder outputs for one input.
struct Encoding {
  nn::Tensor hidden;       // H^L, n x d_h
  nn::Tensor graph_nodes;  // G' of the last graph-enhanced block; undefined if empty
  nn::Tensor cls;          // h_cls, 1 x d_h
  nn::Tensor slots;        // h_sl for every pair, J x d_h
  /// Self-attention weights, block-major then head; each n x n row-stochastic.
  std::vector<nn::Matrix> attention;
};

/// Distributions recorded at each decoding step.
struct DecodeTrace {
  std::vector<nn::Matrix> p_vocab;       // P_s, 1 x |V|
  std::vector<nn::Matrix> p_copy;        // P'_c, 1 x |V|
  std::vector<nn::Matrix> p_positions;   // P_c, 1 x n
  std::vector<nn::Matrix> p_final;       // P, 1 x |V|
  std::vector<double> alpha;
};

/// One training instance with gold targets derived from consecutive states.
struct TrainingExample {
  EncodedInput input;
  StateGraph graph;
  std::vector<nn::Index> op_targets;  // OpKind per pair
  /// (pair, value token ids followed by [EOS]) for every gold UPDATE.
  std::vector<std::pair<std::size_t, std::vector<TokenId>>> value_targets;
};

struct LossParts {
  nn::Tensor operation;   // mean cross-entropy over pair classifications
  nn::Tensor generation;  // mean token cross-entropy over UPDATE values
  nn::Tensor total;
};

/// Normalisers for a batch: the operation term is divided by the number of
/// classified pairs and the generation term by the number of value tokens.
struct LossScale {
  double operation_cells = 1.0;
  double value_tokens = 1.0;
};

struct TurnPrediction {
  OperationMap ops;
  DialogueState state;
};

/// Per-turn predictor used by track_dialogue.
using TurnPredictor = std::function<OperationMap(
    const DialogueTurn* prev_turn, const DialogueTurn& cur_turn, const DialogueState& prev_state,
    std::size_t turn_index)>;

struct TrackedTurn {
  OperationMap ops;
  DialogueState state;
  double latency_ms = 0.0;
};

/// Runs a dialogue from the all-NULL state. With `use_predicted_prev` the
/// previous state fed to each turn is the tracker's own output; otherwise it
/// is the previous gold state.
std::vector<TrackedTurn> track_dialogue(const Dialogue& dialogue, std::size_t pair_count,
                                        const TurnPredictor& predictor, bool use_predicted_prev);

/// The predictor-generator tracker with graph-enhanced encoder blocks.
///
/// Parameters live in a ParamStore so that training, checkpointing and
/// gradient checking all see the same tensors. Inference methods are const
/// and may run concurrently.
class GraphDst {
 public:
  GraphDst(ModelConfig config, Schema schema, Vocabulary vocab, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Schema& schema() const { return schema_; }
  const Vocabulary& vocab() const { return vocab_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// Toggles the graph path without touching parameters.
  void set_graph_enabled(bool enabled) { config_.graph_enabled = enabled; }
  void set_graph_query(GraphQuery q) { config_.graph_query = q; }
  bool has_graph_params() const { return !graph_blocks_.empty(); }

  EncodedInput serialize(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                         const DialogueState& prev_state) const;
  StateGraph graph_for(const DialogueState& prev_state, const EncodedInput& input) const;

  /// `dropout_rng` null means evaluation mode (no dropout).
  Encoding encode(const EncodedInput& input, const StateGraph& graph, nn::ParamBinder& bind,
                  std::mt19937_64* dropout_rng = nullptr) const;

  /// J x 4 logits over {CARRYOVER, DELETE, DONTCARE, UPDATE}.
  nn::Tensor operation_logits(const Encoding& enc, nn::ParamBinder& bind) const;

  /// Sum over steps of -log P(target) under teacher forcing; `targets` ends with [EOS].
  nn::Tensor value_nll(std::size_t pair, const Encoding& enc, const EncodedInput& input,
                       std::span<const TokenId> targets, nn::ParamBinder& bind,
                       DecodeTrace* trace = nullptr) const;

  /// Greedy decoding until [EOS] or max_decode_len tokens.
  std::vector<TokenId> generate_value(std::size_t pair, const Encoding& enc,
                                      const EncodedInput& input, nn::ParamBinder& bind,
                                      DecodeTrace* trace = nullptr) const;

  TrainingExample make_example(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                               const DialogueState& prev_state,
                               const DialogueState& gold_state) const;
  /// Every turn of every dialogue, conditioned on gold previous states.
  std::vector<TrainingExample> make_examples(std::span<const Dialogue> corpus) const;

  LossParts example_loss(const TrainingExample& example, nn::ParamBinder& bind,
                         const LossScale& scale, std::mt19937_64* dropout_rng = nullptr) const;

  /// Predicted operations for one turn; UPDATE values are generated greedily.
  /// An empty generation falls back to CARRYOVER.
  OperationMap predict_operations(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                                  const DialogueState& prev_state) const;

  std::vector<TrackedTurn> track(const Dialogue& dialogue, bool use_predicted_prev) const;

  /// Decoder vocabulary mask: structural specials are never generated.
  const std::vector<std::uint8_t>& generation_mask() const { return generation_mask_; }

 private:
  struct BlockIds {
    nn::ParamId wq, bq, wk, bk, wv, bv;
    nn::ParamId ln1_gain, ln1_bias;
    nn::ParamId w1, b1, w2, b2;
    nn::ParamId ln2_gain, ln2_bias;
  };
  struct GcnLayerIds {
    nn::ParamId w_self, w_in, w_out, self_loop, cooccur, slot_edge;
  };
  struct GraphBlockIds {
    nn::ParamId domain;
    std::vector<GcnLayerIds> layers;
    nn::ParamId w_beta, b_beta, ln_gain, ln_bias;
  };

  void init_params(std::uint64_t seed);
  bool is_graph_block(int layer) const;
  nn::Tensor encode_block(const nn::Tensor& h, int layer, const StateGraph& graph,
                          nn::ParamBinder& bind, std::mt19937_64* rng, Encoding& enc) const;

  struct DecoderContext;
  DecoderContext decoder_context(std::size_t pair, const Encoding& enc, const EncodedInput& input,
                                 nn::ParamBinder& bind) const;

  ModelConfig config_;
  Schema schema_;
  Vocabulary vocab_;
  nn::ParamStore params_;
  std::vector<std::uint8_t> generation_mask_;

  nn::ParamId token_emb_ = 0, position_emb_ = 0, segment_emb_ = 0;
  std::vector<BlockIds> blocks_;
  std::vector<GraphBlockIds> graph_blocks_;  // one per graph-enhanced block, last blocks
  nn::ParamId op_w_ = 0, op_b_ = 0;
  nn::ParamId gru_w_ih_ = 0, gru_w_hh_ = 0, gru_b_ih_ = 0, gru_b_hh_ = 0;
  nn::ParamId start_emb_ = 0, gate_w_ = 0, gate_b_ = 0;
};

/// JSON checkpoint: format tag, version, config, schema pair keys,
/// vocabulary and every parameter tensor. Written atomically.
void save_checkpoint(const GraphDst& model, const std::filesystem::path& path);
std::string checkpoint_json(const GraphDst& model);
/// Throws CheckpointError when the file does not match `schema` or is
/// internally inconsistent, and a plain Error when it cannot be read.
GraphDst load_checkpoint(const std::filesystem::path& path, const Schema& schema);

}  // namespace gdst
