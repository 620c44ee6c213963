#include "hardattn/metrics.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "hardattn/error.hpp"

namespace hardattn {

void MetricRecord::validate() const {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw InvalidArgument("MetricRecord: accuracy outside [0, 1]");
  }
  if (!(ce_bits >= 0.0)) throw InvalidArgument("MetricRecord: negative or NaN cross-entropy");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_csv_row(std::ostream& out, const MetricRecord& r) {
  r.validate();
  out << to_string(r.task) << ',' << r.variant << ',' << to_string(r.scaling) << ',' << r.length
      << ',' << r.samples << ',' << r.seed << ',' << r.epoch << ',' << format_double(r.accuracy)
      << ',' << format_double(r.ce_bits) << ',';
  if (r.attn_mass_first) out << format_double(*r.attn_mass_first);
  out << '\n';
}

void write_csv(std::ostream& out, std::span<const MetricRecord> records) {
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

}  // namespace hardattn
