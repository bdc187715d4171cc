#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sr/formats.hpp"
#include "sr/linalg.hpp"
#include "sr/rng.hpp"
#include "sr/rounding.hpp"
#include "sr/stats.hpp"

namespace sr {

enum class SummandDistribution { Uniform01, Constant };

struct UnbiasednessParams {
  double x = 0.7;
};

struct StagnationParams {
  double s0 = 2048.0;
  double increment = 0.5;
  long k = 1000;
};

struct ErrorGrowthParams {
  std::vector<long> n_list;
  SummandDistribution distribution = SummandDistribution::Uniform01;
  double constant_value = 0.5;  // Constant distribution only
};

struct ConditioningParams {
  int rows = 200;
  int cols = 5;
  bool near_rank_deficiency = true;
};

struct PipelineParams {
  int rows = 100;
  int cols = 4;
};

/// One bag of knobs for every experiment driver; each run_* reads the
/// common fields plus its own parameter block. Streams derive from
/// (seed, [experiment, mode, trial]) so trial order and thread count can
/// never change results.
struct ExperimentConfig {
  FormatSpec fmt;
  std::vector<RoundingMode> modes;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 1;  // work partitioning only; results are independent of it

  UnbiasednessParams unbiasedness;
  StagnationParams stagnation;
  ErrorGrowthParams error_growth;
  ConditioningParams conditioning;
  PipelineParams pipeline;
};

struct UnbiasednessRow {
  RoundingMode mode;
  SummaryStats error;  // round(x) - x across trials
};
struct UnbiasednessResult {
  double x = 0.0;
  std::vector<UnbiasednessRow> rows;
};

struct StagnationRow {
  RoundingMode mode;
  SummaryStats final_sum;
};
struct StagnationResult {
  double expected_exact = 0.0;
  bool increment_below_half_gap = false;  // callers should warn when false
  std::vector<StagnationRow> rows;
};

struct ErrorGrowthCell {
  RoundingMode mode;
  long n = 0;
  int trials = 0;
  double median_err = 0.0;
  double rms_err = 0.0;
  double mean_signed_err = 0.0;
  double ci95_halfwidth = 0.0;
};
struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
};
struct ErrorGrowthFit {
  RoundingMode mode;
  std::optional<SlopeFit> fit;  // absent when some RMS level is zero
};
struct ErrorGrowthResult {
  double unit_roundoff_value = 0.0;
  std::vector<ErrorGrowthCell> cells;
  std::vector<ErrorGrowthFit> fits;
};

struct ConditioningRow {
  RoundingMode mode;
  SummaryStats sigma_min_after;
  double frac_positive = 0.0;  // fraction of trials above positive_threshold
};
struct ConditioningResult {
  double sigma_min_before = 0.0;
  double frobenius_norm = 0.0;  // of the test matrix, for tolerance scaling
  double positive_threshold = 0.0;
  std::vector<ConditioningRow> rows;
};

enum class Pipeline { InputOnly, Full };

std::string pipeline_to_string(Pipeline p);

struct PipelineRow {
  RoundingMode mode;
  Pipeline pipeline = Pipeline::InputOnly;
  SummaryStats rel_error;           // over trials that solved
  int rank_deficient_trials = 0;    // counted, not fatal
};
struct PipelineResult {
  std::vector<PipelineRow> rows;
};

/// Distribution of round(x) - x per mode; SRProportional should center
/// on zero, NearestEven is reported for contrast. Requires
/// trials >= 10000.
UnbiasednessResult run_unbiasedness(const ExperimentConfig& cfg);

/// Repeated tiny increments against a large starting value: NearestEven
/// freezes at s0 when the increment is below half the local gap while
/// SRProportional tracks s0 + k * increment in expectation.
StagnationResult run_stagnation(const ExperimentConfig& cfg);

/// Normalized summation error |computed - exact| / (u * sum |x_i|) over a
/// grid of lengths n, per mode, with a fitted log-log slope of the RMS.
ErrorGrowthResult run_error_growth(const ExperimentConfig& cfg);

/// sigma_min of a near-rank-deficient tall matrix before and after
/// per-mode quantization onto the grid.
ConditioningResult run_conditioning(const ExperimentConfig& cfg);

/// Paired least-squares solution error: inputs quantized then solved in
/// working precision (InputOnly) versus a normal-equations solve carried
/// out entirely in rounded arithmetic (Full).
PipelineResult run_pipeline_comparison(const ExperimentConfig& cfg);

struct PipelineTrialOutcome {
  double input_only_rel_error = 0.0;
  double full_rel_error = 0.0;
  bool input_only_rank_deficient = false;
  bool full_rank_deficient = false;
};

/// One pipeline trial on explicit inputs: quantize (A, b) with
/// `input_key`, solve in working precision, then redo the solve with
/// rounded normal equations drawing from `arith_key`. Relative errors are
/// against the caller's reference solution x_star.
PipelineTrialOutcome run_pipeline_trial(const FormatSpec& fmt,
                                        const RoundingMode& mode,
                                        const Matrix& a,
                                        const std::vector<double>& b,
                                        const std::vector<double>& x_star,
                                        const RngKey& input_key,
                                        const RngKey& arith_key);

/// Ordinary least squares of log y on log n. Needs >= 2 points with
/// positive coordinates and at least two distinct n; the standard error
/// is 0 when there are no residual degrees of freedom.
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

/// Deterministic standard normal draw (Box-Muller, two uniforms per
/// value); used for experiment matrix construction.
double standard_normal(const RngKey& key, std::uint64_t& counter);

}  // namespace sr
