#include "graphdst/trainer.hpp"

#include "graphdst/numerics/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

namespace gdst {

namespace {

std::string divergence_report(const GraphDst& model, int epoch, std::size_t step,
                              double op_loss, double gen_loss) {
  std::ostringstream os;
  os << "training diverged at epoch " << epoch << ", step " << step << ": op loss " << op_loss
     << ", gen loss " << gen_loss;
  for (const auto& p : model.params()) {
    const bool bad_value = !p.value.allFinite();
    const bool bad_grad = p.grad.size() != 0 && !p.grad.allFinite();
    if (bad_value || bad_grad) {
      os << "\n  " << p.name << (bad_value ? " value" : "") << (bad_grad ? " grad" : "")
         << " not finite";
    } else {
      os << "\n  " << p.name << " max|value| " << p.value.cwiseAbs().maxCoeff();
      if (p.grad.size() != 0) os << " max|grad| " << p.grad.cwiseAbs().maxCoeff();
    }
  }
  return os.str();
}

}  // namespace

LossScale batch_loss_scale(std::span<const TrainingExample* const> batch, std::size_t pair_count) {
  LossScale scale;
  scale.operation_cells = static_cast<double>(batch.size() * pair_count);
  std::size_t tokens = 0;
  for (const auto* ex : batch) {
    for (const auto& [pair, ids] : ex->value_targets) tokens += ids.size();
  }
  scale.value_tokens = std::max<double>(1.0, static_cast<double>(tokens));
  return scale;
}

nn::GradCheckReport check_model_gradients(GraphDst& model, std::span<const Dialogue> batch,
                                          const nn::GradCheckOptions& options) {
  const std::vector<TrainingExample> examples = model.make_examples(batch);
  return check_model_gradients(model, std::span<const TrainingExample>(examples), options);
}

nn::GradCheckReport check_model_gradients(GraphDst& model,
                                          std::span<const TrainingExample> examples,
                                          const nn::GradCheckOptions& options) {
  std::vector<const TrainingExample*> ptrs;
  for (const auto& ex : examples) ptrs.push_back(&ex);
  const LossScale scale = batch_loss_scale(ptrs, model.schema().pair_count());
  const GraphDst& frozen = model;
  auto loss = [&](nn::ParamBinder& bind) {
    nn::Tensor total = nn::Tensor::zeros(1, 1);
    for (const auto& ex : examples) total = nn::add(total, frozen.example_loss(ex, bind, scale).total);
    return total;
  };
  return nn::check_gradients(loss, model.params(), options);
}

std::vector<EpochLog> train(GraphDst& model, std::span<const Dialogue> train_set,
                            std::span<const Dialogue> valid_set, const TrainConfig& config,
                            const EpochCallback& on_epoch) {
  if (config.epochs < 0) throw ValidationError("epochs must be nonnegative");
  if (config.batch_size == 0) throw ValidationError("batch size must be positive");
  const std::vector<TrainingExample> examples = model.make_examples(train_set);
  const std::size_t batches_per_epoch =
      (examples.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(config.epochs);

  nn::ParamStore& params = model.params();
  nn::Adam adam(params,
                {{nn::ParamGroup::kEncoder, {config.lr_encoder, config.warmup}},
                 {nn::ParamGroup::kDecoder, {config.lr_decoder, config.warmup}},
                 {nn::ParamGroup::kGraph, {config.lr_graph, 0.0}}},
                total_steps);

  std::mt19937_64 shuffle_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLog> log;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double op_sum = 0.0;
    double gen_sum = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t lo = b * config.batch_size;
      const std::size_t hi = std::min(lo + config.batch_size, examples.size());
      std::vector<const TrainingExample*> batch;
      for (std::size_t k = lo; k < hi; ++k) batch.push_back(&examples[order[k]]);
      const LossScale scale = batch_loss_scale(batch, model.schema().pair_count());

      params.zero_grad();
      nn::Tape tape;
      nn::ParamBinder bind(params, tape);
      nn::Tensor op = nn::Tensor::zeros(1, 1);
      nn::Tensor gen = nn::Tensor::zeros(1, 1);
      for (std::size_t k = lo; k < hi; ++k) {
        LossParts parts = model.example_loss(examples[order[k]], bind, scale, &dropout_rng);
        op = nn::add(op, parts.operation);
        gen = nn::add(gen, parts.generation);
      }
      const double op_value = op.item();
      const double gen_value = gen.item();
      if (!std::isfinite(op_value) || !std::isfinite(gen_value)) {
        throw TrainingDiverged(divergence_report(model, epoch, adam.steps_taken(), op_value,
                                                 gen_value));
      }
      tape.backward(nn::add(op, gen));
      adam.step(params);
      op_sum += op_value;
      gen_sum += gen_value;
    }

    EpochLog entry;
    entry.epoch = epoch;
    if (batches_per_epoch > 0) {
      entry.op_loss = op_sum / static_cast<double>(batches_per_epoch);
      entry.gen_loss = gen_sum / static_cast<double>(batches_per_epoch);
    }
    const bool validate = !valid_set.empty() && config.eval_every > 0 &&
                          (epoch % config.eval_every == 0 || epoch == config.epochs);
    if (validate) {
      entry.valid_joint = evaluate_corpus(model, valid_set, config.eval_predicted_prev).joint;
    }
    log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return log;
}

std::string training_log_csv(std::span<const EpochLog> log) {
  std::ostringstream os;
  os << "epoch,op_loss,gen_loss,valid_joint\n";
  os << std::setprecision(17);
  for (const auto& e : log) {
    os << e.epoch << ',' << e.op_loss << ',' << e.gen_loss << ',';
    if (e.valid_joint) os << *e.valid_joint;
    os << '\n';
  }
  return os.str();
}

CorpusPrediction predict_corpus(const GraphDst& model, std::span<const Dialogue> corpus,
                                bool use_predicted_prev, unsigned threads) {
  CorpusPrediction out;
  out.dialogues.resize(corpus.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(corpus.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      out.dialogues[i] = model.track(corpus[i], use_predicted_prev);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < corpus.size(); i += workers) {
            out.dialogues[i] = model.track(corpus[i], use_predicted_prev);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t t = 0; t < corpus[i].turns.size(); ++t) {
      out.predicted.push_back(out.dialogues[i][t].state);
      out.gold.push_back(corpus[i].turns[t].gold_state);
    }
  }
  return out;
}

AccuracyReport evaluate_corpus(const GraphDst& model, std::span<const Dialogue> corpus,
                               bool use_predicted_prev, unsigned threads) {
  const CorpusPrediction p = predict_corpus(model, corpus, use_predicted_prev, threads);
  return evaluate_states(p.predicted, p.gold, model.schema());
}

double median_turn_latency_ms(const GraphDst& model, std::span<const Dialogue> corpus,
                              bool use_predicted_prev, int repeats) {
  std::vector<double> means;
  for (int r = 0; r < repeats; ++r) {
    double total = 0.0;
    std::size_t turns = 0;
    for (const auto& d : corpus) {
      for (const auto& t : model.track(d, use_predicted_prev)) {
        total += t.latency_ms;
        ++turns;
      }
    }
    if (turns > 0) means.push_back(total / static_cast<double>(turns));
  }
  if (means.empty()) return 0.0;
  std::sort(means.begin(), means.end());
  const std::size_t m = means.size();
  return m % 2 == 1 ? means[m / 2] : 0.5 * (means[m / 2 - 1] + means[m / 2]);
}

}  // namespace gdst
