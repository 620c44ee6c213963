#include <algorithm>
#include <limits>
#include <map>
#include <ostream>

#include "commands.hpp"

namespace hardattn::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 48.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg(std::ostream& out, const std::vector<MetricRecord>& records, bool plot_accuracy) {
  using Key = std::pair<std::string, std::int64_t>;
  std::map<Key, std::vector<std::pair<double, double>>> series;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = plot_accuracy ? 1.0 : 0.0;
  for (const auto& r : records) {
    const double x = r.epoch >= 0 ? static_cast<double>(r.epoch) : static_cast<double>(r.length);
    const double y = plot_accuracy ? r.accuracy : r.ce_bits;
    series[{r.variant, r.seed}].emplace_back(x, y);
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_hi = std::max(y_hi, y);
  }
  if (records.empty()) x_lo = 0.0, x_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) {
    return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<path d=\"M" << kMargin << ' ' << kMargin << " V" << kHeight - kMargin << " H"
      << kWidth - kMargin << "\" stroke=\"black\" fill=\"none\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 8 << "\">"
      << (plot_accuracy ? "accuracy" : "cross-entropy (bits)") << ", max "
      << format_double(y_hi) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"end\">" << format_double(x_lo) << " .. " << format_double(x_hi)
      << "</text>\n";
  std::size_t colour = 0;
  for (auto& [key, points] : series) {
    std::sort(points.begin(), points.end());
    const char* stroke = kPalette[colour++ % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
    for (const auto& [x, y] : points) out << px(x) << ',' << py(y) << ' ';
    out << "\"><title>" << key.first << " seed " << key.second << "</title></polyline>\n";
  }
  out << "</svg>\n";
}

}  // namespace hardattn::cli
