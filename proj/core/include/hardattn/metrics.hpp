#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hardattn/data.hpp"
#include "hardattn/model.hpp"

namespace hardattn {

inline constexpr std::string_view kMetricsHeader =
    "task,variant,attn_scaling,length,samples,seed,epoch,accuracy,ce_bits,attn_mass_first";

/// One row of an experiment CSV. epoch is -1 for static evaluations; seed is
/// -1 on aggregate (mean over runs) rows.
struct MetricRecord {
  Task task = Task::Parity;
  std::string variant = "none";
  AttnScaling scaling = AttnScaling::Standard;
  std::size_t length = 0;
  std::size_t samples = 0;
  std::int64_t seed = 0;
  std::int64_t epoch = -1;
  double accuracy = 0.0;
  double ce_bits = 0.0;
  std::optional<double> attn_mass_first;

  /// Throws InvalidArgument unless accuracy is in [0, 1] and ce_bits >= 0.
  void validate() const;
};

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double x);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const MetricRecord& record);
void write_csv(std::ostream& out, std::span<const MetricRecord> records);

}  // namespace hardattn
