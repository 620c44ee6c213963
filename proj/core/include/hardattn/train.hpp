#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hardattn/data.hpp"
#include "hardattn/metrics.hpp"
#include "hardattn/model.hpp"
#include "hardattn/rng.hpp"
#include "hardattn/transformer.hpp"

namespace hardattn {

struct TrainConfig {
  Task task = Task::First;
  std::size_t d_model = 16;
  std::size_t d_ffnn = 64;
  std::size_t layers = 2;
  std::size_t heads = 0;  // 0 selects 2 for PARITY and 1 for FIRST
  double ln_eps = 1e-5;
  AttnScaling scaling = AttnScaling::Standard;
  double lr = 3e-4;
  std::size_t epochs = 1000;
  std::size_t strings_per_epoch = 100;
  std::size_t train_length = 100;
  /// When nonzero, training lengths are drawn uniformly from
  /// [min_train_length, train_length] instead of being fixed.
  std::size_t min_train_length = 0;
  std::size_t test_length = 1000;
  std::size_t test_count = 100;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  /// Evaluate after every eval_every-th epoch (and always after the last).
  std::size_t eval_every = 1;
  /// Stop a run at the first evaluation whose test accuracy reaches this.
  std::optional<double> stop_at_accuracy;

  std::size_t head_count() const noexcept;
  /// Throws InvalidArgument on zero counts, bad epsilon or learning rate.
  void validate() const;
};

/// Fresh trainable model: weights uniform in +-1/sqrt(fan_in) (fan_in of a word
/// embedding is the alphabet size), zero biases, and the fixed positional
/// encoding of the task's exact construction in the leading dimensions.
ModelParams init_params(const TrainConfig& config, RngStream& rng);

/// Sum over layers and heads of the CLS query's attention weight on position 1.
/// Throws InvalidArgument for traces with fewer than two positions.
double attn_mass_first(const ActivationTrace& trace);

struct EvalResult {
  double accuracy = 0.0;
  double ce_bits = 0.0;
  double attn_mass_first = 0.0;
};

/// Mean accuracy, cross-entropy (bits) and first-position attention mass over a dataset.
EvalResult evaluate(const ModelParams& params, const LabeledDataset& data);

struct TrainRun {
  std::uint64_t seed = 0;
  std::vector<MetricRecord> records;      // one per evaluated epoch
  std::vector<double> epoch_loss;         // mean training loss per epoch, nats
  std::vector<double> first_epoch_steps;  // per-string losses of epoch 1, nats
  ModelParams params;
};

/// One training run seeded by config.seed: batch size 1, a fresh training
/// sample every epoch, and a fixed test set of test_count strings of length
/// test_length. Deterministic given the config.
TrainRun train_run(const TrainConfig& config);

/// config.runs independent runs with seeds seed, seed+1, ...; executed on the
/// worker pool, returned in seed order.
std::vector<TrainRun> train_runs(const TrainConfig& config);

/// Per-run records followed by a mean curve (seed -1). A run that stopped early
/// contributes its last evaluation to later epochs.
std::vector<MetricRecord> collect_records(std::span<const TrainRun> runs);

}  // namespace hardattn
