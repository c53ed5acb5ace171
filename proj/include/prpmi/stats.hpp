#pragma once

#include <span>
#include <vector>

namespace prpmi {

// Quantile with linear interpolation between order statistics.
double quantile(std::span<const double> sorted, double p);

struct BoxStats {
  int n = 0;
  double median = 0.0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  // Most extreme data points within 1.5 IQR of the quartiles.
  double lo_whisker = 0.0;
  double hi_whisker = 0.0;
  std::vector<double> outliers;  // ascending
};

// Throws std::invalid_argument on empty input.
BoxStats box_stats(std::vector<double> values);

// (value - reference) / |reference| in percent; 0 when both are 0.
double delta_percent(double value, double reference);

}  // namespace prpmi
