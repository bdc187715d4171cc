#pragma once

#include <span>

namespace sr {

/// Distribution summary of one experiment quantity across trials.
/// Quantiles use linear interpolation between order statistics;
/// ci95_halfwidth is the normal-approximation 1.96 * std / sqrt(trials).
struct SummaryStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double ci95_halfwidth = 0.0;
  int trials = 0;
};

SummaryStats summarize(std::span<const double> values);

/// Interpolated quantile of a pre-sorted ascending sample, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace sr
