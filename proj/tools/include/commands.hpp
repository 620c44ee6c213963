#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardattn/backward.hpp"
#include "hardattn/data.hpp"
#include "hardattn/metrics.hpp"
#include "hardattn/model.hpp"
#include "hardattn/train.hpp"

namespace hardattn::cli {

/// none: the bare construction. ln_eps / ln_zero: negation-wrapped, layer
/// normalization with eps (or exactly 0), plus the amplifier layer.
struct Variant {
  enum class Kind { None, LnEps, LnZero };
  Kind kind = Kind::None;
  double eps = 1e-5;

  std::string name() const;
  NormMode norm() const;
};

Variant parse_variant(std::string_view name, double eps = 1e-5);

/// "1..100", "2..1000:2", "50,100,500" or combinations joined by commas.
std::vector<std::size_t> parse_lengths(std::string_view text);

struct ExactModelOptions {
  Task task = Task::Parity;
  Variant variant;
  double c = 1.0;
  bool flawed = false;  // FIRST only: the single-layer construction
  bool scaled = false;  // log-length attention
  /// Amplifier target cross-entropy in nats; unset means output scale 1.
  std::optional<double> eta;
};

ModelParams build_exact_model(const ExactModelOptions& options);

struct EvalExactOptions {
  ExactModelOptions model;
  std::vector<std::size_t> lengths{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

/// One record per length, in the order given.
std::vector<MetricRecord> cmd_eval_exact(const EvalExactOptions& options);

struct SweepOptions {
  std::vector<double> grid;  // empty: 201 points on [0.5, 1.5]
  std::size_t samples = 1000;
  std::vector<std::size_t> lengths{100};
  std::uint64_t seed = 0;
};

std::vector<double> default_sweep_grid();

/// Wrapped PARITY (exact normalization + amplifier) with the layer-1 value
/// weight that copies k/n into dimension 5 overwritten by each grid value.
/// The grid value is carried in the variant column as "w=<value>".
std::vector<MetricRecord> cmd_sweep_param(const SweepOptions& options);

/// All per-run records for config.runs runs, followed by the mean curve.
std::vector<MetricRecord> cmd_train(const TrainConfig& config);

struct GradCheckOptions {
  std::uint64_t seed = 0;
  std::size_t string_length = 8;
  /// Test hook applied to the analytic gradients before comparison.
  std::function<void(Gradients&)> tamper;
};

/// Checks a default-shaped PARITY model (two heads) and FIRST model (one
/// head, log-length scaling) against finite differences; prints the max
/// relative error per tensor. Returns true when every tensor passes.
bool cmd_grad_check(const GradCheckOptions& options, std::ostream& report);

/// Polyline chart of `records`: x is length for static evaluations and epoch
/// for training records, one series per (variant, seed).
void write_svg(std::ostream& out, const std::vector<MetricRecord>& records, bool plot_accuracy);

/// Writes the CSV to a file, creating parent directories; throws Error with the path.
void write_csv_file(const std::string& path, const std::vector<MetricRecord>& records);

}  // namespace hardattn::cli
