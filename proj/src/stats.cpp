#include "prpmi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace prpmi {

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("no values to summarize");
  std::sort(values.begin(), values.end());
  BoxStats b;
  b.n = static_cast<int>(values.size());
  b.median = quantile(values, 0.5);
  b.q1 = quantile(values, 0.25);
  b.q3 = quantile(values, 0.75);
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / b.n;
  const double iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * iqr, hi = b.q3 + 1.5 * iqr;
  b.lo_whisker = std::numeric_limits<double>::infinity();
  b.hi_whisker = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v < lo || v > hi) {
      b.outliers.push_back(v);
      continue;
    }
    b.lo_whisker = std::min(b.lo_whisker, v);
    b.hi_whisker = std::max(b.hi_whisker, v);
  }
  return b;
}

double delta_percent(double value, double reference) {
  if (value == reference) return 0.0;
  if (reference == 0.0) return value > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return 100.0 * (value - reference) / std::abs(reference);
}

}  // namespace prpmi
