#include "graphdst/model.hpp"

#include "graphdst/errors.hpp"
#include "graphdst/numerics/layers.hpp"

#include <chrono>

namespace gdst {

using nn::Index;
using nn::Matrix;
using nn::ParamGroup;
using nn::Tensor;

namespace {

std::vector<Index> as_index(const std::vector<TokenId>& ids) {
  return std::vector<Index>(ids.begin(), ids.end());
}

}  // namespace

struct GraphDst::DecoderContext {
  Tensor hidden;
  Tensor word_emb;
  Tensor graph_summary;
  nn::GruParams gru;
  Tensor start;
  Tensor gate_w;
  Tensor gate_b;
  Tensor init_state;
  Tensor first_input;
  std::vector<Index> token_ids;
  std::vector<std::uint8_t> position_mask;
};

GraphDst::GraphDst(ModelConfig config, Schema schema, Vocabulary vocab, std::uint64_t seed)
    : config_(std::move(config)), schema_(std::move(schema)), vocab_(std::move(vocab)) {
  if (config_.vocab_size != 0 && config_.vocab_size != vocab_.size()) {
    throw ValidationError("model config: vocab_size " + std::to_string(config_.vocab_size) +
                          " does not match vocabulary of " + std::to_string(vocab_.size()));
  }
  config_.vocab_size = vocab_.size();
  config_.validate();

  generation_mask_.assign(vocab_.size(), 1);
  for (TokenId id : {Vocabulary::kPad, Vocabulary::kCls, Vocabulary::kSep, Vocabulary::kSlot,
                     Vocabulary::kNull, Vocabulary::kDontCare, Vocabulary::kDash}) {
    generation_mask_[static_cast<std::size_t>(id)] = 0;
  }
  init_params(seed);
}

void GraphDst::init_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index d = config_.d_h;
  const Index ff = config_.d_ff;
  const Index v = static_cast<Index>(vocab_.size());
  const double s = config_.init_scale;
  auto& p = params_;
  auto ones = [](Index n) { return Matrix::Ones(1, n); };
  const auto enc = ParamGroup::kEncoder;
  const auto dec = ParamGroup::kDecoder;
  const auto gcn = ParamGroup::kGraph;

  token_emb_ = p.add_uniform("enc.token_emb", enc, v, d, s, rng);
  position_emb_ = p.add_uniform("enc.position_emb", enc, static_cast<Index>(config_.max_seq_len), d,
                                s, rng);
  segment_emb_ = p.add_uniform("enc.segment_emb", enc, 2, d, s, rng);
  for (int l = 0; l < config_.n_layers; ++l) {
    const std::string pre = "enc.layer" + std::to_string(l) + ".";
    BlockIds b{};
    b.wq = p.add_uniform(pre + "attn.wq", enc, d, d, s, rng);
    b.bq = p.add_zeros(pre + "attn.bq", enc, 1, d);
    b.wk = p.add_uniform(pre + "attn.wk", enc, d, d, s, rng);
    b.bk = p.add_zeros(pre + "attn.bk", enc, 1, d);
    b.wv = p.add_uniform(pre + "attn.wv", enc, d, d, s, rng);
    b.bv = p.add_zeros(pre + "attn.bv", enc, 1, d);
    b.ln1_gain = p.add(pre + "ln1.gain", enc, ones(d));
    b.ln1_bias = p.add_zeros(pre + "ln1.bias", enc, 1, d);
    b.w1 = p.add_uniform(pre + "ffn.w1", enc, d, ff, s, rng);
    b.b1 = p.add_zeros(pre + "ffn.b1", enc, 1, ff);
    b.w2 = p.add_uniform(pre + "ffn.w2", enc, ff, d, s, rng);
    b.b2 = p.add_zeros(pre + "ffn.b2", enc, 1, d);
    b.ln2_gain = p.add(pre + "ln2.gain", enc, ones(d));
    b.ln2_bias = p.add_zeros(pre + "ln2.bias", enc, 1, d);
    blocks_.push_back(b);
  }
  op_w_ = p.add_uniform("enc.op_classifier.w", enc, d, static_cast<Index>(kNumOperations), s, rng);
  op_b_ = p.add_zeros("enc.op_classifier.b", enc, 1, static_cast<Index>(kNumOperations));

  // Graph tensors draw from their own stream so that the shared tensors are
  // identical with and without the graph path.
  if (config_.graph_enabled) {
    std::mt19937_64 graph_rng(seed ^ 0x6a09e667f3bcc909ULL);
    const Index n_domains = static_cast<Index>(schema_.domains().size());
    const Index n_slots = static_cast<Index>(schema_.slot_names().size());
    for (int g = 0; g < config_.n_graph_blocks; ++g) {
      const int layer = config_.n_layers - config_.n_graph_blocks + g;
      const std::string pre = "gcn.block" + std::to_string(layer) + ".";
      GraphBlockIds gb{};
      gb.domain = p.add_uniform(pre + "domain_emb", gcn, n_domains, d, s, graph_rng);
      for (int k = 0; k < config_.n_gcn_layers; ++k) {
        const std::string lp = pre + "layer" + std::to_string(k) + ".";
        GcnLayerIds li{};
        li.w_self = p.add_uniform(lp + "w_self", gcn, d, d, s, graph_rng);
        li.w_in = p.add_uniform(lp + "w_in", gcn, d, d, s, graph_rng);
        li.w_out = p.add_uniform(lp + "w_out", gcn, d, d, s, graph_rng);
        li.self_loop = p.add_uniform(lp + "self_loop_emb", gcn, 1, d, s, graph_rng);
        li.cooccur = p.add_uniform(lp + "cooccur_emb", gcn, 1, d, s, graph_rng);
        li.slot_edge = p.add_uniform(lp + "slot_edge_emb", gcn, n_slots, d, s, graph_rng);
        gb.layers.push_back(li);
      }
      gb.w_beta = p.add_uniform(pre + "fusion.w_beta", gcn, d, 1, s, graph_rng);
      gb.b_beta = p.add_zeros(pre + "fusion.b_beta", gcn, 1, 1);
      gb.ln_gain = p.add(pre + "fusion.ln_gain", gcn, ones(d));
      gb.ln_bias = p.add_zeros(pre + "fusion.ln_bias", gcn, 1, d);
      graph_blocks_.push_back(std::move(gb));
    }
  }

  gru_w_ih_ = p.add_uniform("dec.gru.w_ih", dec, d, 3 * d, s, rng);
  gru_w_hh_ = p.add_uniform("dec.gru.w_hh", dec, d, 3 * d, s, rng);
  gru_b_ih_ = p.add_zeros("dec.gru.b_ih", dec, 1, 3 * d);
  gru_b_hh_ = p.add_zeros("dec.gru.b_hh", dec, 1, 3 * d);
  start_emb_ = p.add_uniform("dec.start_emb", dec, 1, d, s, rng);
  gate_w_ = p.add_uniform("dec.copy_gate.w", dec, 4 * d, 1, s, rng);
  gate_b_ = p.add_zeros("dec.copy_gate.b", dec, 1, 1);
}

bool GraphDst::is_graph_block(int layer) const {
  return layer >= config_.n_layers - config_.n_graph_blocks;
}

EncodedInput GraphDst::serialize(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                                 const DialogueState& prev_state) const {
  return serialize_input(prev_turn, cur_turn, prev_state, schema_, vocab_, config_.max_seq_len);
}

StateGraph GraphDst::graph_for(const DialogueState& prev_state, const EncodedInput& input) const {
  return build_state_graph(prev_state, schema_, input.slot_positions);
}

Tensor GraphDst::encode_block(const Tensor& h, int layer, const StateGraph& graph,
                              nn::ParamBinder& bind, std::mt19937_64* rng,
                              Encoding& enc) const {
  const BlockIds& b = blocks_[static_cast<std::size_t>(layer)];
  nn::AttentionParams ap{bind(b.wq), bind(b.bq), bind(b.wk), bind(b.bk), bind(b.wv), bind(b.bv)};
  nn::AttentionResult mha = nn::multi_head_attention(h, ap, config_.n_heads);
  Tensor attn = mha.output;
  for (auto& w : mha.weights) enc.attention.push_back(std::move(w));

  if (config_.graph_enabled && is_graph_block(layer) && !graph.empty()) {
    if (graph_blocks_.empty()) {
      throw ValidationError("graph path enabled but the model has no graph parameters");
    }
    const auto& gb = graph_blocks_[static_cast<std::size_t>(
        layer - (config_.n_layers - config_.n_graph_blocks))];
    GraphEmbeddings emb;
    emb.domain = bind(gb.domain);
    for (const auto& li : gb.layers) {
      emb.layers.push_back({bind(li.w_self), bind(li.w_in), bind(li.w_out), bind(li.self_loop),
                            bind(li.cooccur), bind(li.slot_edge)});
    }
    RgcnOptions opts;
    opts.update_placeholders = config_.update_placeholders;
    RgcnOutput r = rgcn_update(graph, attn, emb, opts);
    attn = fuse(attn, graph, r.domains,
                FusionParams{bind(gb.w_beta), bind(gb.b_beta), bind(gb.ln_gain), bind(gb.ln_bias)});
    enc.graph_nodes = r.nodes;
  }
  if (rng != nullptr) attn = nn::dropout(attn, config_.dropout, *rng);
  Tensor h1 = nn::layer_norm(nn::add(h, attn), bind(b.ln1_gain), bind(b.ln1_bias));
  Tensor f = nn::feed_forward(h1, {bind(b.w1), bind(b.b1), bind(b.w2), bind(b.b2)});
  if (rng != nullptr) f = nn::dropout(f, config_.dropout, *rng);
  return nn::layer_norm(nn::add(h1, f), bind(b.ln2_gain), bind(b.ln2_bias));
}

Encoding GraphDst::encode(const EncodedInput& input, const StateGraph& graph, nn::ParamBinder& bind,
                          std::mt19937_64* dropout_rng) const {
  const std::size_t n = input.size();
  if (n == 0 || n > config_.max_seq_len) {
    throw ValidationError("encode: input length " + std::to_string(n) + " outside [1, " +
                          std::to_string(config_.max_seq_len) + "]");
  }
  if (input.slot_positions.size() != schema_.pair_count()) {
    throw ValidationError("encode: input has " + std::to_string(input.slot_positions.size()) +
                          " slot positions, schema has " + std::to_string(schema_.pair_count()));
  }
  std::vector<Index> seg(input.segment_ids.begin(), input.segment_ids.end());
  std::vector<Index> pos(input.position_ids.begin(), input.position_ids.end());
  Tensor h = nn::add(nn::add(nn::gather_rows(bind(token_emb_), as_index(input.token_ids)),
                             nn::gather_rows(bind(position_emb_), pos)),
                     nn::gather_rows(bind(segment_emb_), seg));
  if (dropout_rng != nullptr) h = nn::dropout(h, config_.dropout, *dropout_rng);

  Encoding enc;
  for (int l = 0; l < config_.n_layers; ++l) {
    h = encode_block(h, l, graph, bind, dropout_rng, enc);
  }
  enc.hidden = h;
  enc.cls = nn::slice_rows(h, static_cast<Index>(input.cls_position), 1);
  std::vector<Index> slots(input.slot_positions.begin(), input.slot_positions.end());
  enc.slots = nn::gather_rows(h, slots);
  return enc;
}

Tensor GraphDst::operation_logits(const Encoding& enc, nn::ParamBinder& bind) const {
  return nn::affine(enc.slots, bind(op_w_), bind(op_b_));
}

GraphDst::DecoderContext GraphDst::decoder_context(std::size_t pair, const Encoding& enc,
                                                   const EncodedInput& input,
                                                   nn::ParamBinder& bind) const {
  if (pair >= schema_.pair_count()) throw ValidationError("decoder: pair index out of range");
  DecoderContext ctx;
  ctx.hidden = enc.hidden;
  ctx.word_emb = bind(token_emb_);
  ctx.gru = {bind(gru_w_ih_), bind(gru_w_hh_), bind(gru_b_ih_), bind(gru_b_hh_)};
  ctx.start = bind(start_emb_);
  ctx.gate_w = bind(gate_w_);
  ctx.gate_b = bind(gate_b_);
  ctx.init_state = enc.cls;
  ctx.first_input = nn::slice_rows(enc.slots, static_cast<Index>(pair), 1);
  const Tensor& query = config_.graph_query == GraphQuery::kCls ? enc.cls : ctx.first_input;
  ctx.graph_summary = config_.graph_enabled ? graph_attention(query, enc.graph_nodes)
                                            : Tensor::zeros(1, config_.d_h);
  ctx.token_ids = as_index(input.token_ids);
  ctx.position_mask.resize(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    ctx.position_mask[i] = generation_mask_[static_cast<std::size_t>(input.token_ids[i])];
  }
  return ctx;
}

namespace {

struct StepResult {
  Tensor state;
  Tensor p_final;
};

StepResult decode_step(const Tensor& x, const Tensor& prev_word, const Tensor& state,
                       const Tensor& hidden, const Tensor& word_emb, const Tensor& graph_summary,
                       const nn::GruParams& gru, const Tensor& gate_w, const Tensor& gate_b,
                       std::span<const Index> token_ids, std::span<const std::uint8_t> position_mask,
                       std::span<const std::uint8_t> vocab_mask, DecodeTrace* trace) {
  Tensor s = nn::gru_step(x, state, gru);
  Tensor p_vocab = nn::softmax_rows(nn::matmul_nt(s, word_emb), vocab_mask);
  Tensor p_pos = nn::softmax_rows(nn::matmul_nt(s, hidden), position_mask);
  Tensor p_copy = nn::scatter_add_cols(p_pos, token_ids, word_emb.rows());
  Tensor context = nn::matmul(p_pos, hidden);
  std::vector<Tensor> gate_in = {s, prev_word, context, graph_summary};
  Tensor alpha = nn::sigmoid(nn::add(nn::matmul(nn::concat_cols(gate_in), gate_w), gate_b));
  Tensor p = nn::add(nn::scale_rows(p_vocab, alpha), nn::scale_rows(p_copy, nn::one_minus(alpha)));
  if (trace != nullptr) {
    trace->p_vocab.push_back(p_vocab.value());
    trace->p_copy.push_back(p_copy.value());
    trace->p_positions.push_back(p_pos.value());
    trace->p_final.push_back(p.value());
    trace->alpha.push_back(alpha.item());
  }
  return {s, p};
}

}  // namespace

Tensor GraphDst::value_nll(std::size_t pair, const Encoding& enc, const EncodedInput& input,
                           std::span<const TokenId> targets, nn::ParamBinder& bind,
                           DecodeTrace* trace) const {
  DecoderContext ctx = decoder_context(pair, enc, input, bind);
  Tensor x = ctx.first_input;
  Tensor prev_word = ctx.start;
  Tensor state = ctx.init_state;
  Tensor total = Tensor::zeros(1, 1);
  for (TokenId target : targets) {
    StepResult r = decode_step(x, prev_word, state, ctx.hidden, ctx.word_emb, ctx.graph_summary,
                               ctx.gru, ctx.gate_w, ctx.gate_b, ctx.token_ids, ctx.position_mask,
                               generation_mask_, trace);
    total = nn::sub(total, nn::log(nn::pick(r.p_final, 0, static_cast<Index>(target))));
    const Index t[] = {static_cast<Index>(target)};
    x = nn::gather_rows(ctx.word_emb, t);
    prev_word = x;
    state = r.state;
  }
  return total;
}

std::vector<TokenId> GraphDst::generate_value(std::size_t pair, const Encoding& enc,
                                              const EncodedInput& input, nn::ParamBinder& bind,
                                              DecodeTrace* trace) const {
  DecoderContext ctx = decoder_context(pair, enc, input, bind);
  Tensor x = ctx.first_input;
  Tensor prev_word = ctx.start;
  Tensor state = ctx.init_state;
  std::vector<TokenId> out;
  while (out.size() < config_.max_decode_len) {
    StepResult r = decode_step(x, prev_word, state, ctx.hidden, ctx.word_emb, ctx.graph_summary,
                               ctx.gru, ctx.gate_w, ctx.gate_b, ctx.token_ids, ctx.position_mask,
                               generation_mask_, trace);
    Index best = 0;
    r.p_final.value().row(0).maxCoeff(&best);
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    const Index t[] = {best};
    x = nn::gather_rows(ctx.word_emb, t);
    prev_word = x;
    state = r.state;
  }
  return out;
}

TrainingExample GraphDst::make_example(const DialogueTurn* prev_turn, const DialogueTurn& cur_turn,
                                       const DialogueState& prev_state,
                                       const DialogueState& gold_state) const {
  TrainingExample ex;
  ex.input = serialize(prev_turn, cur_turn, prev_state);
  ex.graph = graph_for(prev_state, ex.input);
  const OperationMap ops = derive_operations(prev_state, gold_state);
  for (std::size_t j = 0; j < ops.size(); ++j) {
    ex.op_targets.push_back(static_cast<Index>(ops[j].kind));
    if (ops[j].kind != OpKind::kUpdate) continue;
    std::vector<TokenId> target = vocab_.encode(tokenize(ops[j].value));
    target.push_back(Vocabulary::kEos);
    ex.value_targets.emplace_back(j, std::move(target));
  }
  return ex;
}

std::vector<TrainingExample> GraphDst::make_examples(std::span<const Dialogue> corpus) const {
  std::vector<TrainingExample> out;
  for (const auto& d : corpus) {
    DialogueState prev = DialogueState::empty(schema_.pair_count());
    for (std::size_t t = 0; t < d.turns.size(); ++t) {
      const DialogueTurn* prev_turn = t == 0 ? nullptr : &d.turns[t - 1];
      out.push_back(make_example(prev_turn, d.turns[t], prev, d.turns[t].gold_state));
      prev = d.turns[t].gold_state;
    }
  }
  return out;
}

LossParts GraphDst::example_loss(const TrainingExample& ex, nn::ParamBinder& bind,
                                 const LossScale& scale, std::mt19937_64* dropout_rng) const {
  Encoding enc = encode(ex.input, ex.graph, bind, dropout_rng);
  LossParts parts;
  parts.operation = nn::scale(nn::cross_entropy_rows(operation_logits(enc, bind), ex.op_targets),
                              1.0 / scale.operation_cells);
  Tensor gen = Tensor::zeros(1, 1);
  for (const auto& [pair, target] : ex.value_targets) {
    gen = nn::add(gen, value_nll(pair, enc, ex.input, target, bind));
  }
  parts.generation = ex.value_targets.empty() ? gen : nn::scale(gen, 1.0 / scale.value_tokens);
  parts.total = nn::add(parts.operation, parts.generation);
  return parts;
}

OperationMap GraphDst::predict_operations(const DialogueTurn* prev_turn,
                                          const DialogueTurn& cur_turn,
                                          const DialogueState& prev_state) const {
  const EncodedInput input = serialize(prev_turn, cur_turn, prev_state);
  const StateGraph graph = graph_for(prev_state, input);
  nn::ParamBinder bind(params_);
  const Encoding enc = encode(input, graph, bind);
  const Matrix logits = operation_logits(enc, bind).value();
  OperationMap ops(schema_.pair_count());
  for (std::size_t j = 0; j < ops.size(); ++j) {
    Index best = 0;
    logits.row(static_cast<Index>(j)).maxCoeff(&best);
    const auto kind = static_cast<OpKind>(best);
    switch (kind) {
      case OpKind::kCarryover: break;
      case OpKind::kDelete: ops[j] = StateOperation::remove(); break;
      case OpKind::kDontCare: ops[j] = StateOperation::dontcare(); break;
      case OpKind::kUpdate: {
        const auto ids = generate_value(j, enc, input, bind);
        if (!ids.empty()) ops[j] = StateOperation::update(join_tokens(vocab_.decode(ids)));
        break;
      }
    }
  }
  return ops;
}

std::vector<TrackedTurn> GraphDst::track(const Dialogue& dialogue, bool use_predicted_prev) const {
  return track_dialogue(
      dialogue, schema_.pair_count(),
      [this](const DialogueTurn* prev_turn, const DialogueTurn& cur, const DialogueState& prev,
             std::size_t) { return predict_operations(prev_turn, cur, prev); },
      use_predicted_prev);
}

std::vector<TrackedTurn> track_dialogue(const Dialogue& dialogue, std::size_t pair_count,
                                        const TurnPredictor& predictor, bool use_predicted_prev) {
  std::vector<TrackedTurn> out;
  DialogueState predicted = DialogueState::empty(pair_count);
  DialogueState gold_prev = DialogueState::empty(pair_count);
  for (std::size_t t = 0; t < dialogue.turns.size(); ++t) {
    const DialogueTurn* prev_turn = t == 0 ? nullptr : &dialogue.turns[t - 1];
    const DialogueState& prev = use_predicted_prev ? predicted : gold_prev;
    const auto start = std::chrono::steady_clock::now();
    TrackedTurn turn;
    turn.ops = predictor(prev_turn, dialogue.turns[t], prev, t);
    turn.state = apply_operations(prev, turn.ops);
    turn.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    predicted = turn.state;
    gold_prev = dialogue.turns[t].gold_state;
    out.push_back(std::move(turn));
  }
  return out;
}

}  // namespace gdst
