#pragma once

#include "graphdst/errors.hpp"
#include "graphdst/model.hpp"
#include "graphdst/numerics/gradcheck.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gdst {

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  double lr_encoder = 4e-4;
  double lr_decoder = 1e-3;
  double lr_graph = 1e-2;
  /// Warmup proportion of the encoder and decoder groups; the gcn group has none.
  double warmup = 0.1;
  /// Validation every this many epochs (and always after the last); 0 disables it.
  int eval_every = 1;
  /// Validation feeds the tracker its own previous predictions.
  bool eval_predicted_prev = true;
};

struct EpochLog {
  int epoch = 0;
  double op_loss = 0.0;   // mean over batches
  double gen_loss = 0.0;  // mean over batches
  std::optional<double> valid_joint;
};

/// Raised when the loss stops being finite. `what()` carries a diagnostic dump.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch training with one gradient tape per batch. Shuffling and
/// dropout draw from separate generators seeded from `config.seed`.
std::vector<EpochLog> train(GraphDst& model, std::span<const Dialogue> train_set,
                            std::span<const Dialogue> valid_set, const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

/// Loss normalisers for a batch, as used by train().
LossScale batch_loss_scale(std::span<const TrainingExample* const> batch, std::size_t pair_count);

/// Gradient check of the full training loss (no dropout) over every turn of `batch`.
nn::GradCheckReport check_model_gradients(GraphDst& model, std::span<const Dialogue> batch,
                                          const nn::GradCheckOptions& options = {});
nn::GradCheckReport check_model_gradients(GraphDst& model,
                                          std::span<const TrainingExample> examples,
                                          const nn::GradCheckOptions& options = {});

std::string training_log_csv(std::span<const EpochLog> log);

struct CorpusPrediction {
  /// Predicted states, dialogue-major, one per turn.
  std::vector<DialogueState> predicted;
  std::vector<DialogueState> gold;
  /// Per-dialogue tracked turns, same order as the corpus.
  std::vector<std::vector<TrackedTurn>> dialogues;
};

/// Tracks every dialogue; `threads` > 1 shards dialogues over worker threads.
/// Results do not depend on the thread count.
CorpusPrediction predict_corpus(const GraphDst& model, std::span<const Dialogue> corpus,
                                bool use_predicted_prev, unsigned threads = 1);

AccuracyReport evaluate_corpus(const GraphDst& model, std::span<const Dialogue> corpus,
                               bool use_predicted_prev, unsigned threads = 1);

/// Median over `repeats` runs of the mean per-turn tracking time in
/// milliseconds, single-threaded, batch size 1.
double median_turn_latency_ms(const GraphDst& model, std::span<const Dialogue> corpus,
                              bool use_predicted_prev, int repeats);

}  // namespace gdst
