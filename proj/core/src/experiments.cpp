#include "sr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "sr/arith.hpp"
#include "sr/calibration.hpp"
#include "sr/errors.hpp"
#include "sr/text.hpp"

namespace sr {
namespace {

std::uint64_t u64(long v) { return static_cast<std::uint64_t>(v); }
std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

// Runs body(0..trials-1), possibly across threads. Each trial writes only
// its own output slot, so the schedule cannot influence results.
void for_each_trial(int trials, int threads,
                    const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        body(t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void validate_common(const ExperimentConfig& cfg, const char* who,
                     int min_trials) {
  cfg.fmt.validate();
  if (cfg.modes.empty())
    raise(ErrorKind::ConfigError,
          std::string(who) + ": at least one rounding mode required");
  if (cfg.trials < min_trials)
    raise(ErrorKind::ConfigError,
          std::string(who) + ": trials must be >= " +
              std::to_string(min_trials));
  if (cfg.threads < 1)
    raise(ErrorKind::ConfigError, std::string(who) + ": threads must be >= 1");
}

void require_in_range(const FormatSpec& fmt, double v, const char* who,
                      const char* what) {
  if (!std::isfinite(v) || v > max_finite(fmt) || v < min_finite(fmt))
    raise(ErrorKind::ConfigError, std::string(who) + ": " + what +
                                      " lies outside the range of " +
                                      fmt.to_string());
}

Matrix gaussian_matrix(int rows, int cols, const RngKey& key, double scale) {
  Matrix a(rows, cols);
  std::uint64_t counter = 0;
  for (double& v : a.data) v = scale * standard_normal(key, counter);
  return a;
}

double norm2(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double rel_error(const std::vector<double>& x, const std::vector<double>& ref) {
  std::vector<double> diff(x.size());
  for (size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - ref[i];
  return norm2(diff) / norm2(ref);
}

// Normal-equations solve with every operation rounded into env.fmt:
// Gram matrix and right-hand side through rounded dots, then Gaussian
// elimination with partial pivoting through rounded mul/sub/div. Entry
// and elimination order is fixed (row-major) so draws replay exactly.
std::vector<double> solve_normal_equations_rounded(
    ArithEnv& env, const Matrix& aq, const std::vector<double>& bq) {
  const int n = aq.cols;
  std::vector<std::vector<double>> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = aq.column(j);

  Matrix gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram.at(i, j) = dot(env, cols[i], cols[j]);
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = dot(env, cols[i], bq);

  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(gram.at(i, k)) > std::abs(gram.at(pivot, k))) pivot = i;
    if (pivot != k) {
      for (int j = 0; j < n; ++j) std::swap(gram.at(k, j), gram.at(pivot, j));
      std::swap(rhs[k], rhs[pivot]);
    }
    if (gram.at(k, k) == 0.0)
      raise(ErrorKind::RankDeficient,
            "normal equations: zero pivot at column " + std::to_string(k));
    for (int i = k + 1; i < n; ++i) {
      const double factor = div(env, gram.at(i, k), gram.at(k, k));
      for (int j = k + 1; j < n; ++j)
        gram.at(i, j) = sub(env, gram.at(i, j), mul(env, factor, gram.at(k, j)));
      rhs[i] = sub(env, rhs[i], mul(env, factor, rhs[k]));
    }
  }

  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double acc = rhs[k];
    for (int j = k + 1; j < n; ++j)
      acc = sub(env, acc, mul(env, gram.at(k, j), x[j]));
    x[k] = div(env, acc, gram.at(k, k));
  }
  return x;
}

}  // namespace

double standard_normal(const RngKey& key, std::uint64_t& counter) {
  const double u1 = 1.0 - uniform_unit(key, counter);      // (0, 1]
  const double u2 = uniform_unit(key, counter + 1);
  counter += 2;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::string pipeline_to_string(Pipeline p) {
  return p == Pipeline::InputOnly ? "input-only" : "full";
}

UnbiasednessResult run_unbiasedness(const ExperimentConfig& cfg) {
  validate_common(cfg, "unbiasedness", 10000);
  const double x = cfg.unbiasedness.x;
  require_in_range(cfg.fmt, x, "unbiasedness", "x");

  UnbiasednessResult result;
  result.x = x;
  for (const RoundingMode& mode : cfg.modes) {
    const std::string mode_str = mode.to_string();
    std::vector<double> errors(cfg.trials);
    for_each_trial(cfg.trials, cfg.threads, [&](int t) {
      const RngKey key =
          derive_stream(cfg.seed, {"unbiasedness", mode_str, u64(t)});
      errors[t] =
          round(cfg.fmt, mode, OverflowPolicy::Strict, x, key, 0) - x;
    });
    result.rows.push_back({mode, summarize(errors)});
  }
  return result;
}

StagnationResult run_stagnation(const ExperimentConfig& cfg) {
  validate_common(cfg, "stagnation", 30);
  const StagnationParams& p = cfg.stagnation;
  if (p.k < 1)
    raise(ErrorKind::ConfigError, "stagnation: k must be >= 1");
  if (!is_representable(cfg.fmt, p.s0))
    raise(ErrorKind::ConfigError, "stagnation: --s0 " + format_double(p.s0) +
                                      " is not representable in " +
                                      cfg.fmt.to_string());
  if (!is_representable(cfg.fmt, p.increment))
    raise(ErrorKind::ConfigError,
          "stagnation: --inc " + format_double(p.increment) +
              " is not representable in " + cfg.fmt.to_string());

  StagnationResult result;
  result.expected_exact = p.s0 + static_cast<double>(p.k) * p.increment;
  result.increment_below_half_gap = true;
  if (p.increment != 0.0) {
    try {
      const double toward = p.increment > 0.0
                                ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
      const Bracket next = bracket(cfg.fmt, std::nextafter(p.s0, toward));
      result.increment_below_half_gap = std::abs(p.increment) < next.gap / 2.0;
    } catch (const Error&) {
      result.increment_below_half_gap = false;
    }
  }

  std::vector<double> xs(static_cast<size_t>(p.k) + 1, p.increment);
  xs[0] = p.s0;

  for (const RoundingMode& mode : cfg.modes) {
    const std::string mode_str = mode.to_string();
    std::vector<double> finals(cfg.trials);
    for_each_trial(cfg.trials, cfg.threads, [&](int t) {
      ArithEnv env{cfg.fmt, mode, OverflowPolicy::Strict,
                   derive_stream(cfg.seed, {"stagnation", mode_str, u64(t)}),
                   0};
      finals[t] = sum_sequential(env, xs);
    });
    result.rows.push_back({mode, summarize(finals)});
  }
  return result;
}

ErrorGrowthResult run_error_growth(const ExperimentConfig& cfg) {
  validate_common(cfg, "error-growth", 30);
  const ErrorGrowthParams& p = cfg.error_growth;
  if (p.n_list.empty())
    raise(ErrorKind::ConfigError, "error-growth: n list is empty");
  for (size_t i = 0; i < p.n_list.size(); ++i) {
    if (p.n_list[i] < 1)
      raise(ErrorKind::ConfigError, "error-growth: n values must be >= 1");
    if (i > 0 && p.n_list[i] <= p.n_list[i - 1])
      raise(ErrorKind::ConfigError,
            "error-growth: n list must be strictly increasing");
  }
  if (p.n_list.back() < 100 * p.n_list.front())
    raise(ErrorKind::ConfigError,
          "error-growth: n list must span at least two decades");

  const double top = max_finite(cfg.fmt);
  double quantized_constant = 0.0;
  if (p.distribution == SummandDistribution::Constant) {
    require_in_range(cfg.fmt, p.constant_value, "error-growth",
                     "constant summand");
    quantized_constant =
        round(cfg.fmt, RoundingMode::nearest_even(), OverflowPolicy::Strict,
              p.constant_value, RngKey{}, 0);
    if (quantized_constant == 0.0)
      raise(ErrorKind::ConfigError,
            "error-growth: constant summand quantizes to zero");
  }
  for (long n : p.n_list) {
    const double nd = static_cast<double>(n);
    const double bound = p.distribution == SummandDistribution::Uniform01
                             ? 0.5 * nd + 5.0 * std::sqrt(nd / 12.0) + 1.0
                             : std::abs(quantized_constant) * nd;
    if (bound > top)
      raise(ErrorKind::ConfigError,
            "error-growth: partial sums would exceed max_finite at n=" +
                std::to_string(n));
  }

  const double u = unit_roundoff(cfg.fmt).value;
  const RoundingMode rn = RoundingMode::nearest_even();

  ErrorGrowthResult result;
  result.unit_roundoff_value = u;
  const size_t n_modes = cfg.modes.size();
  std::vector<std::string> mode_strs;
  for (const RoundingMode& m : cfg.modes) mode_strs.push_back(m.to_string());

  std::vector<std::vector<std::vector<double>>> abs_err(n_modes);
  std::vector<std::vector<std::vector<double>>> signed_err(n_modes);
  for (size_t m = 0; m < n_modes; ++m) {
    abs_err[m].assign(p.n_list.size(),
                      std::vector<double>(cfg.trials, 0.0));
    signed_err[m].assign(p.n_list.size(),
                         std::vector<double>(cfg.trials, 0.0));
  }

  for (size_t ni = 0; ni < p.n_list.size(); ++ni) {
    const long n = p.n_list[ni];
    try {
      for_each_trial(cfg.trials, cfg.threads, [&](int t) {
        std::vector<double> xs(static_cast<size_t>(n));
        if (p.distribution == SummandDistribution::Uniform01) {
          const RngKey data_key = derive_stream(
              cfg.seed, {"error-growth", "data", u64(n), u64(t)});
          for (long i = 0; i < n; ++i) {
            const double raw = uniform_unit(data_key, u64(i));
            xs[static_cast<size_t>(i)] =
                round(cfg.fmt, rn, OverflowPolicy::Strict, raw, data_key, 0);
          }
        } else {
          std::fill(xs.begin(), xs.end(), quantized_constant);
        }

        const double exact = sum_exact(xs);
        double sum_abs = 0.0, comp = 0.0;
        for (double v : xs) {
          const double av = std::abs(v);
          const double s = sum_abs + av;
          comp += (sum_abs - s) + av;
          sum_abs = s;
        }
        sum_abs += comp;
        const double denom = u * sum_abs;
        if (denom == 0.0)
          raise(ErrorKind::NonPositive,
                "error-growth: zero normalization (all summands zero)");

        for (size_t m = 0; m < n_modes; ++m) {
          ArithEnv env{cfg.fmt, cfg.modes[m], OverflowPolicy::Strict,
                       derive_stream(cfg.seed, {"error-growth", "round",
                                                mode_strs[m], u64(n), u64(t)}),
                       0};
          const double computed = sum_sequential(env, xs);
          const double d = (computed - exact) / denom;
          signed_err[m][ni][t] = d;
          abs_err[m][ni][t] = std::abs(d);
        }
      });
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OutOfRange)
        raise(ErrorKind::OutOfRange,
              "error-growth: overflow at n=" + std::to_string(n));
      throw;
    }
  }

  for (size_t m = 0; m < n_modes; ++m) {
    for (size_t ni = 0; ni < p.n_list.size(); ++ni) {
      const std::vector<double>& errors = abs_err[m][ni];
      const SummaryStats abs_stats = summarize(errors);
      double sq = 0.0;
      for (double e : errors) sq += e * e;
      double signed_mean = 0.0;
      for (double s : signed_err[m][ni]) signed_mean += s;
      signed_mean /= static_cast<double>(cfg.trials);

      ErrorGrowthCell cell;
      cell.mode = cfg.modes[m];
      cell.n = p.n_list[ni];
      cell.trials = cfg.trials;
      cell.median_err = abs_stats.median;
      cell.rms_err = std::sqrt(sq / static_cast<double>(cfg.trials));
      cell.mean_signed_err = signed_mean;
      cell.ci95_halfwidth = abs_stats.ci95_halfwidth;
      result.cells.push_back(cell);
    }

    std::vector<std::pair<double, double>> points;
    bool fittable = true;
    for (size_t ni = 0; ni < p.n_list.size(); ++ni) {
      const ErrorGrowthCell& cell =
          result.cells[m * p.n_list.size() + ni];
      if (cell.rms_err <= 0.0) fittable = false;
      points.emplace_back(static_cast<double>(cell.n), cell.rms_err);
    }
    ErrorGrowthFit fit_row;
    fit_row.mode = cfg.modes[m];
    if (fittable && points.size() >= 2)
      fit_row.fit = fit_loglog_slope(points);
    result.fits.push_back(fit_row);
  }
  return result;
}

ConditioningResult run_conditioning(const ExperimentConfig& cfg) {
  validate_common(cfg, "conditioning", 30);
  const ConditioningParams& p = cfg.conditioning;
  if (p.cols < 1)
    raise(ErrorKind::ConfigError, "conditioning: cols must be >= 1");
  if (p.rows < 4 * p.cols)
    raise(ErrorKind::ConfigError,
          "conditioning: tall-and-thin requires rows >= 4*cols");
  if (p.near_rank_deficiency && p.cols < 2)
    raise(ErrorKind::ConfigError,
          "conditioning: duplicated column needs cols >= 2");

  Matrix a = gaussian_matrix(p.rows, p.cols,
                             derive_stream(cfg.seed, {"conditioning", "matrix"}),
                             1.0);
  if (p.near_rank_deficiency)
    for (int i = 0; i < p.rows; ++i) a.at(i, 1) = a.at(i, 0);
  for (double v : a.data)
    require_in_range(cfg.fmt, v, "conditioning", "matrix entry");

  ConditioningResult result;
  result.sigma_min_before = sigma_min(a);
  result.frobenius_norm = frobenius_norm(a);
  result.positive_threshold = calibration::kConditioningSigmaMinThreshold;

  for (const RoundingMode& mode : cfg.modes) {
    const std::string mode_str = mode.to_string();
    std::vector<double> smin(cfg.trials);
    for_each_trial(cfg.trials, cfg.threads, [&](int t) {
      ArithEnv env{cfg.fmt, mode, OverflowPolicy::Strict,
                   derive_stream(cfg.seed, {"conditioning", mode_str, u64(t)}),
                   0};
      const Matrix quantized = quantize_matrix(env, a);
      try {
        smin[t] = sigma_min(quantized);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NonConvergence)
          raise(ErrorKind::NonConvergence,
                std::string(e.what()) + " (trial " + std::to_string(t) + ")");
        throw;
      }
    });
    int positive = 0;
    for (double s : smin)
      if (s > result.positive_threshold) ++positive;
    result.rows.push_back({mode, summarize(smin),
                           static_cast<double>(positive) /
                               static_cast<double>(cfg.trials)});
  }
  return result;
}

PipelineTrialOutcome run_pipeline_trial(const FormatSpec& fmt,
                                        const RoundingMode& mode,
                                        const Matrix& a,
                                        const std::vector<double>& b,
                                        const std::vector<double>& x_star,
                                        const RngKey& input_key,
                                        const RngKey& arith_key) {
  if (norm2(x_star) == 0.0)
    raise(ErrorKind::InvalidInput, "pipeline trial: reference solution is 0");

  ArithEnv input_env{fmt, mode, OverflowPolicy::Strict, input_key, 0};
  const Matrix aq = quantize_matrix(input_env, a);
  const std::vector<double> bq = quantize_vector(input_env, b);

  PipelineTrialOutcome out;
  try {
    out.input_only_rel_error = rel_error(lls_solve(aq, bq), x_star);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RankDeficient) throw;
    out.input_only_rank_deficient = true;
  }

  ArithEnv arith_env{fmt, mode, OverflowPolicy::Strict, arith_key, 0};
  try {
    out.full_rel_error =
        rel_error(solve_normal_equations_rounded(arith_env, aq, bq), x_star);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RankDeficient &&
        e.kind() != ErrorKind::DivisionByZero)
      throw;
    out.full_rank_deficient = true;
  }
  return out;
}

PipelineResult run_pipeline_comparison(const ExperimentConfig& cfg) {
  validate_common(cfg, "pipeline", 30);
  const PipelineParams& p = cfg.pipeline;
  if (p.cols < 1)
    raise(ErrorKind::ConfigError, "pipeline: cols must be >= 1");
  if (p.rows < p.cols)
    raise(ErrorKind::ConfigError, "pipeline: need rows >= cols");

  // Entry scale 1/sqrt(rows) keeps the rounded Gram matrix inside the
  // grid range.
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.rows));
  const Matrix a = gaussian_matrix(
      p.rows, p.cols, derive_stream(cfg.seed, {"pipeline", "matrix"}), scale);

  RngKey xkey = derive_stream(cfg.seed, {"pipeline", "x"});
  std::uint64_t xctr = 0;
  std::vector<double> x_true(p.cols);
  for (double& v : x_true) v = standard_normal(xkey, xctr);

  RngKey nkey = derive_stream(cfg.seed, {"pipeline", "noise"});
  std::uint64_t nctr = 0;
  std::vector<double> b = matvec(a, x_true);
  for (double& v : b) v += 0.01 * standard_normal(nkey, nctr);

  for (double v : a.data) require_in_range(cfg.fmt, v, "pipeline", "matrix entry");
  for (double v : b) require_in_range(cfg.fmt, v, "pipeline", "rhs entry");

  const std::vector<double> x_star = lls_solve(a, b);
  if (norm2(x_star) == 0.0)
    raise(ErrorKind::InvalidInput, "pipeline: reference solution is 0");

  PipelineResult result;
  for (const RoundingMode& mode : cfg.modes) {
    const std::string mode_str = mode.to_string();
    std::vector<PipelineTrialOutcome> outcomes(cfg.trials);
    for_each_trial(cfg.trials, cfg.threads, [&](int t) {
      outcomes[t] = run_pipeline_trial(
          cfg.fmt, mode, a, b, x_star,
          derive_stream(cfg.seed, {"pipeline", "inputs", mode_str, u64(t)}),
          derive_stream(cfg.seed, {"pipeline", "arith", mode_str, u64(t)}));
    });

    for (const Pipeline pipeline : {Pipeline::InputOnly, Pipeline::Full}) {
      std::vector<double> errors;
      int rank_deficient = 0;
      for (const PipelineTrialOutcome& o : outcomes) {
        const bool bad = pipeline == Pipeline::InputOnly
                             ? o.input_only_rank_deficient
                             : o.full_rank_deficient;
        if (bad) {
          ++rank_deficient;
          continue;
        }
        errors.push_back(pipeline == Pipeline::InputOnly
                             ? o.input_only_rel_error
                             : o.full_rel_error);
      }
      PipelineRow row;
      row.mode = mode;
      row.pipeline = pipeline;
      row.rank_deficient_trials = rank_deficient;
      if (!errors.empty()) row.rel_error = summarize(errors);
      result.rows.push_back(row);
    }
  }
  return result;
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2)
    raise(ErrorKind::InvalidInput, "fit_loglog_slope: need at least 2 points");
  for (const auto& [n, y] : points)
    if (!(n > 0.0) || !(y > 0.0))
      raise(ErrorKind::NonPositive,
            "fit_loglog_slope: coordinates must be positive");
  bool distinct = false;
  for (const auto& [n, y] : points)
    if (n != points[0].first) distinct = true;
  if (!distinct)
    raise(ErrorKind::InvalidInput, "fit_loglog_slope: n values must not all "
                                   "coincide");

  const int k = static_cast<int>(points.size());
  Matrix design(k, 2);
  std::vector<double> target(k);
  for (int i = 0; i < k; ++i) {
    design.at(i, 0) = 1.0;
    design.at(i, 1) = std::log(points[i].first);
    target[i] = std::log(points[i].second);
  }
  const std::vector<double> beta = lls_solve(design, target);

  SlopeFit fit;
  fit.slope = beta[1];
  if (k > 2) {
    double rss = 0.0, tbar = 0.0;
    for (int i = 0; i < k; ++i) tbar += design.at(i, 1);
    tbar /= k;
    double sxx = 0.0;
    for (int i = 0; i < k; ++i) {
      const double r = target[i] - (beta[0] + beta[1] * design.at(i, 1));
      rss += r * r;
      sxx += (design.at(i, 1) - tbar) * (design.at(i, 1) - tbar);
    }
    fit.std_error = std::sqrt(std::max(0.0, rss / (k - 2)) / sxx);
  }
  return fit;
}

}  // namespace sr
