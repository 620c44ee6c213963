#include "hardattn/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hardattn/backward.hpp"
#include "hardattn/error.hpp"
#include "hardattn/optim.hpp"
#include "hardattn/parallel.hpp"

namespace hardattn {

std::size_t TrainConfig::head_count() const noexcept {
  if (heads != 0) return heads;
  return task == Task::Parity ? 2 : 1;
}

void TrainConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw InvalidArgument(std::string("TrainConfig: ") + name + " must be positive");
  };
  positive(d_model, "d_model");
  positive(d_ffnn, "d_ffnn");
  positive(layers, "layers");
  positive(epochs, "epochs");
  positive(strings_per_epoch, "strings_per_epoch");
  positive(train_length, "train_length");
  positive(test_length, "test_length");
  positive(test_count, "test_count");
  positive(runs, "runs");
  positive(eval_every, "eval_every");
  if (!(ln_eps > 0.0) || !std::isfinite(ln_eps)) {
    throw InvalidArgument("TrainConfig: training needs a positive layer-norm epsilon");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("TrainConfig: bad learning rate");
  if (min_train_length > train_length) {
    throw InvalidArgument("TrainConfig: min_train_length exceeds train_length");
  }
  const std::size_t pe_dims = task == Task::Parity ? 5 : 4;
  if (d_model < pe_dims) {
    throw InvalidArgument("TrainConfig: d_model too small for the positional encoding");
  }
}

ModelParams init_params(const TrainConfig& config, RngStream& rng) {
  config.validate();
  const std::size_t d = config.d_model;
  const std::size_t ff = config.d_ffnn;
  auto fill = [&](std::span<double> v, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& x : v) x = rng.uniform(-bound, bound);
  };

  ModelParams p;
  p.width = d;
  p.norm = NormMode::layer_norm(config.ln_eps);
  p.scaling = config.scaling;
  p.positional.family = config.task == Task::Parity ? PositionalEncoding::Family::Parity
                                                    : PositionalEncoding::Family::First;
  for (auto& e : p.word_embeddings) {
    e.assign(d, 0.0);
    fill(e, kAlphabetSize);
  }
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerParams layer = LayerParams::zeros(d, config.head_count(), ff);
    for (auto& head : layer.heads) {
      fill(head.query.data(), d);
      fill(head.key.data(), d);
      fill(head.value.data(), d);
    }
    fill(layer.ffn_in.data(), d);
    fill(layer.ffn_out.data(), ff);
    p.layers.push_back(std::move(layer));
  }
  p.output_weights.assign(d, 0.0);
  fill(p.output_weights, d);
  p.output_bias = 0.0;
  p.validate();
  return p;
}

double attn_mass_first(const ActivationTrace& trace) {
  if (trace.positions() < 2) throw InvalidArgument("attn_mass_first: needs at least two positions");
  double mass = 0.0;
  for (const auto& layer : trace.layers) {
    for (const auto& head : layer.heads) mass += head.row(0)[1];
  }
  return mass;
}

EvalResult evaluate(const ModelParams& params, const LabeledDataset& data) {
  const std::size_t count = data.items.size();
  if (count == 0) throw InvalidArgument("evaluate: empty dataset");
  std::vector<double> correct(count), ce(count), mass(count);
  parallel_for(count, [&](std::size_t i) {
    const auto& item = data.items[i];
    const ActivationTrace trace = encoder_forward(params, item.seq);
    correct[i] = (trace.logit > 0.0) == item.label ? 1.0 : 0.0;
    ce[i] = cross_entropy_bits_from_logit(trace.logit, item.label);
    mass[i] = item.seq.size() >= 2 ? attn_mass_first(trace) : 0.0;
  });
  EvalResult r;
  for (std::size_t i = 0; i < count; ++i) {
    r.accuracy += correct[i];
    r.ce_bits += ce[i];
    r.attn_mass_first += mass[i];
  }
  const double m = static_cast<double>(count);
  r.accuracy /= m;
  r.ce_bits /= m;
  r.attn_mass_first /= m;
  return r;
}

TrainRun train_run(const TrainConfig& config) {
  config.validate();
  const RngStream root(config.seed);
  RngStream init_rng = root.derive(0);
  RngStream test_rng = root.derive(1);
  RngStream train_rng = root.derive(2);

  TrainRun run;
  run.seed = config.seed;
  run.params = init_params(config, init_rng);
  const LabeledDataset test =
      make_dataset(config.task, FixedLength{config.test_length}, config.test_count, test_rng);
  const LengthSpec train_lengths =
      config.min_train_length == 0
          ? LengthSpec{FixedLength{config.train_length}}
          : LengthSpec{UniformLength{config.min_train_length, config.train_length}};

  OptimizerState state = OptimizerState::for_model(run.params, AdamConfig{.lr = config.lr});
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const LabeledDataset batch =
        make_dataset(config.task, train_lengths, config.strings_per_epoch, train_rng);
    double total = 0.0;
    for (const auto& item : batch.items) {
      const BackwardResult br = backward(run.params, item.seq, item.label);
      adam_step(state, run.params, br.grads);
      total += br.loss;
      if (epoch == 1) run.first_epoch_steps.push_back(br.loss);
    }
    run.epoch_loss.push_back(total / static_cast<double>(batch.items.size()));

    if (epoch % config.eval_every != 0 && epoch != config.epochs) continue;
    const EvalResult eval = evaluate(run.params, test);
    MetricRecord rec;
    rec.task = config.task;
    rec.variant = "ln_eps";
    rec.scaling = config.scaling;
    rec.length = config.train_length;
    rec.samples = config.test_count;
    rec.seed = static_cast<std::int64_t>(config.seed);
    rec.epoch = static_cast<std::int64_t>(epoch);
    rec.accuracy = eval.accuracy;
    rec.ce_bits = eval.ce_bits;
    rec.attn_mass_first = eval.attn_mass_first;
    run.records.push_back(rec);
    if (config.stop_at_accuracy && eval.accuracy >= *config.stop_at_accuracy) break;
  }
  return run;
}

std::vector<TrainRun> train_runs(const TrainConfig& config) {
  config.validate();
  std::vector<TrainRun> runs(config.runs);
  parallel_for(config.runs, [&](std::size_t r) {
    TrainConfig c = config;
    c.seed = config.seed + r;
    c.runs = 1;
    runs[r] = train_run(c);
  });
  return runs;
}

std::vector<MetricRecord> collect_records(std::span<const TrainRun> runs) {
  std::vector<MetricRecord> out;
  std::map<std::int64_t, std::size_t> epochs;
  for (const auto& run : runs) {
    for (const auto& rec : run.records) {
      out.push_back(rec);
      epochs.emplace(rec.epoch, 0);
    }
  }
  if (runs.empty()) return out;
  for (const auto& [epoch, unused] : epochs) {
    MetricRecord mean;
    std::size_t contributors = 0;
    double mass = 0.0;
    for (const auto& run : runs) {
      const MetricRecord* last = nullptr;
      for (const auto& rec : run.records) {
        if (rec.epoch > epoch) break;
        last = &rec;
      }
      if (last == nullptr) continue;
      if (contributors == 0) mean = *last;
      else {
        mean.accuracy += last->accuracy;
        mean.ce_bits += last->ce_bits;
      }
      mass += last->attn_mass_first.value_or(0.0);
      ++contributors;
    }
    if (contributors == 0) continue;
    const double m = static_cast<double>(contributors);
    mean.seed = -1;
    mean.epoch = epoch;
    mean.accuracy /= m;
    mean.ce_bits /= m;
    mean.attn_mass_first = mass / m;
    out.push_back(mean);
  }
  return out;
}

}  // namespace hardattn
