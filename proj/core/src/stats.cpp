#include "sr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sr/errors.hpp"

namespace sr {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) raise(ErrorKind::EmptyInput, "quantile: empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = static_cast<size_t>(std::ceil(h));
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

namespace {

// Neumaier-compensated accumulation; keeps constant-sample statistics
// exact and long sums faithful.
double compensated_mean(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values.size());
}

}  // namespace

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) raise(ErrorKind::EmptyInput, "summarize: empty sample");
  const size_t n = values.size();

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  // A constant sample has these statistics exactly; zero variance across
  // trials is how deterministic modes are recognized downstream.
  if (sorted.front() == sorted.back()) {
    SummaryStats stats;
    stats.mean = sorted.front();
    stats.std_dev = 0.0;
    stats.median = sorted.front();
    stats.q05 = sorted.front();
    stats.q95 = sorted.front();
    stats.ci95_halfwidth = 0.0;
    stats.trials = static_cast<int>(n);
    return stats;
  }

  const double mean = compensated_mean(values);

  double var = 0.0;
  if (n > 1) {
    double comp = 0.0;
    for (double v : values) {
      const double sq = (v - mean) * (v - mean);
      const double t = var + sq;
      comp += (var - t) + sq;
      var = t;
    }
    var = (var + comp) / static_cast<double>(n - 1);
  }
  const double std_dev = std::sqrt(var);

  SummaryStats stats;
  stats.mean = mean;
  stats.std_dev = std_dev;
  stats.median = quantile_sorted(sorted, 0.5);
  stats.q05 = quantile_sorted(sorted, 0.05);
  stats.q95 = quantile_sorted(sorted, 0.95);
  stats.ci95_halfwidth = 1.96 * std_dev / std::sqrt(static_cast<double>(n));
  stats.trials = static_cast<int>(n);
  return stats;
}

}  // namespace sr
