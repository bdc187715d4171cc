// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with its measured quantities. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "sr/arith.hpp"
#include "sr/calibration.hpp"
#include "sr/csv.hpp"
#include "sr/errors.hpp"
#include "sr/experiments.hpp"
#include "test_oracles.hpp"

namespace fs = std::filesystem;
using namespace sr;

namespace {

std::string g_tool = SR_ARITH_BIN;
int g_failures = 0;

struct Criterion {
  int number;
  const char* name;
  double time_limit_seconds;
};

void report(const Criterion& c, bool pass, double seconds,
            const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("criterion %d (%s): %s  [%.2fs < %.0fs]  %s\n", c.number, c.name,
              pass ? "PASS" : "FAIL", seconds, c.time_limit_seconds,
              detail.c_str());
  std::fflush(stdout);
}

void run_criterion(const Criterion& c,
                   const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (seconds > c.time_limit_seconds) {
    pass = false;
    detail += " [over time limit]";
  }
  report(c, pass, seconds, detail);
}

std::string fmt_num(double v) { return format_double(v); }

// ---------------------------------------------------------------------
// 1. Unbiasedness on the one-bit grid: 1e6 SR draws of 0.7 land on 1 with
//    empirical frequency 0.7 +- 0.00184.
bool criterion_unbiasedness(std::string& detail) {
  const FormatSpec one_bit = FormatSpec::make_fixed(false, 1, 0);
  const RngKey key = derive_stream(7, {"acceptance", "unbiasedness"});
  const int n = 1000000;
  int ups = 0;
  for (int c = 0; c < n; ++c)
    if (round(one_bit, RoundingMode::sr_proportional(), OverflowPolicy::Strict,
              0.7, key, static_cast<std::uint64_t>(c)) == 1.0)
      ++ups;
  const double freq = static_cast<double>(ups) / n;
  detail = "up-frequency " + fmt_num(freq) + " vs 0.7 +- 0.00184";
  return std::abs(freq - 0.7) <= 0.00184;
}

// ---------------------------------------------------------------------
// 2. Stagnation: rn returns exactly 2048 in every one of 1e3 trials with
//    zero variance; sr trial mean lies within 4*(std/sqrt(1e3)) of 2548.
bool criterion_stagnation(std::string& detail) {
  ExperimentConfig cfg;
  cfg.fmt = FormatSpec::make_float(5, 10);
  cfg.modes = {RoundingMode::nearest_even(), RoundingMode::sr_proportional()};
  cfg.seed = 7;
  cfg.trials = 1000;
  cfg.stagnation = {2048.0, 0.5, 1000};
  const StagnationResult result = run_stagnation(cfg);

  const SummaryStats& rn = result.rows[0].final_sum;
  const SummaryStats& sr_stats = result.rows[1].final_sum;
  const double band = 4.0 * sr_stats.std_dev / std::sqrt(1000.0);
  detail = "rn mean " + fmt_num(rn.mean) + " std " + fmt_num(rn.std_dev) +
           "; sr mean " + fmt_num(sr_stats.mean) + " vs 2548 +- " +
           fmt_num(band);
  const bool rn_exact = rn.mean == 2048.0 && rn.std_dev == 0.0 &&
                        rn.q05 == 2048.0 && rn.q95 == 2048.0;
  return rn_exact && std::abs(sr_stats.mean - 2548.0) <= band;
}

// ---------------------------------------------------------------------
// 3. Error growth: sr slope within the locked band; rn median at n=1e5 at
//    least the locked factor above sr's.
bool criterion_error_growth(std::string& detail) {
  ExperimentConfig cfg;
  cfg.fmt = FormatSpec::make_float(5, 10);
  cfg.modes = {RoundingMode::nearest_even(), RoundingMode::sr_proportional()};
  cfg.seed = 7;
  cfg.trials = 100;
  cfg.error_growth.n_list = {1000, 3000, 10000, 30000, 100000};
  const ErrorGrowthResult result = run_error_growth(cfg);

  double sr_slope = 0.0;
  bool have_fit = false;
  for (const ErrorGrowthFit& fit : result.fits)
    if (fit.mode == RoundingMode::sr_proportional() && fit.fit) {
      sr_slope = fit.fit->slope;
      have_fit = true;
    }
  double rn_median = 0.0, sr_median = 0.0;
  for (const ErrorGrowthCell& cell : result.cells)
    if (cell.n == 100000) {
      if (cell.mode == RoundingMode::nearest_even()) rn_median = cell.median_err;
      if (cell.mode == RoundingMode::sr_proportional())
        sr_median = cell.median_err;
    }
  const double ratio = rn_median / sr_median;
  detail = "sr slope " + fmt_num(sr_slope) + " in [" +
           fmt_num(calibration::kErrorGrowthSrSlopeMin) + ", " +
           fmt_num(calibration::kErrorGrowthSrSlopeMax) + "]; rn/sr median " +
           fmt_num(ratio) + " >= " +
           fmt_num(calibration::kErrorGrowthRnOverSrMin);
  return have_fit && sr_slope >= calibration::kErrorGrowthSrSlopeMin &&
         sr_slope <= calibration::kErrorGrowthSrSlopeMax &&
         ratio >= calibration::kErrorGrowthRnOverSrMin;
}

// ---------------------------------------------------------------------
// 4. Conditioning: sigma_min of the duplicated-column matrix is zero to
//    oracle tolerance before quantization, and SR lifts it above the
//    locked threshold in at least 99% of 1e3 trials.
bool criterion_conditioning(std::string& detail) {
  ExperimentConfig cfg;
  cfg.fmt = FormatSpec::make_fixed(true, 4, 8);
  cfg.modes = {RoundingMode::sr_proportional()};
  cfg.seed = 7;
  cfg.trials = 1000;
  cfg.conditioning = {200, 5, true};
  const ConditioningResult result = run_conditioning(cfg);

  const double tolerance = 1e-10 * result.frobenius_norm;
  const ConditioningRow& sr_row = result.rows[0];
  detail = "sigma_min before " + fmt_num(result.sigma_min_before) + " <= " +
           fmt_num(tolerance) + "; frac above " +
           fmt_num(result.positive_threshold) + ": " +
           fmt_num(sr_row.frac_positive);
  return result.sigma_min_before <= tolerance &&
         sr_row.frac_positive >= calibration::kConditioningFracPositiveMin;
}

// ---------------------------------------------------------------------
// 5. Rounding-rule correctness by brute force over every format with at
//    most 12 total bits.
bool criterion_brute_force(std::string& detail) {
  std::vector<FormatSpec> formats;
  for (int e = 2; e <= 10; ++e)
    for (int m = 1; m + e <= 11; ++m)
      for (bool sub : {true, false})
        for (bool inf : {true, false})
          formats.push_back(FormatSpec::make_float(e, m, sub, inf));
  for (int i = 0; i <= 11; ++i)
    for (int f = 0; f <= 11; ++f) {
      if (i + f < 1) continue;
      if (i + f <= 11) formats.push_back(FormatSpec::make_fixed(true, i, f));
      if (i + f <= 12) formats.push_back(FormatSpec::make_fixed(false, i, f));
    }

  const std::vector<RoundingMode> modes = {
      RoundingMode::nearest_even(), RoundingMode::sr_proportional(),
      RoundingMode::sr_up_down(), RoundingMode::sr_selective(0.05)};
  const RngKey key = derive_stream(7, {"acceptance", "brute"});

  long checked = 0;
  for (const FormatSpec& fmt : formats) {
    const std::vector<double> members = sr_test::enumerate_members(fmt);

    // Representable-value identity under all modes; bracket degeneracy.
    for (double member : members) {
      const Bracket b = bracket(fmt, member);
      if (b.lo != member || b.hi != member || b.gap != 0.0) {
        detail = fmt.to_string() + ": bracket not degenerate at " +
                 fmt_num(member);
        return false;
      }
      for (const RoundingMode& mode : modes) {
        const RoundOutcome out = round_one(fmt, mode, OverflowPolicy::Strict,
                                           member, key, 0);
        if (out.value != member || out.used_draw) {
          detail = fmt.to_string() + ": " + mode.to_string() +
                   " perturbed member " + fmt_num(member);
          return false;
        }
      }
    }

    // Ties to even at every adjacent-member midpoint.
    for (size_t i = 0; i + 1 < members.size(); ++i) {
      const double lo = members[i];
      const double hi = members[i + 1];
      const double gap = hi - lo;
      const double mid = lo + gap / 2.0;
      const double rounded = round(fmt, RoundingMode::nearest_even(),
                                   OverflowPolicy::Strict, mid, key, 0);
      if (rounded != lo && rounded != hi) {
        detail = fmt.to_string() + ": tie escaped the bracket at " +
                 fmt_num(mid);
        return false;
      }
      const long long index = std::llround(rounded / gap);
      if (index % 2 != 0) {
        detail = fmt.to_string() + ": tie at " + fmt_num(mid) +
                 " chose the odd index";
        return false;
      }
    }

    // Bracket endpoints against enumeration, and round in {lo, hi}, for
    // 1e4 random in-range reals.
    sr_test::TestRng rng(7, std::hash<std::string>{}(fmt.to_string()));
    for (int trial = 0; trial < 10000; ++trial) {
      const double x = rng.range(members.front(), members.back());
      const Bracket got = bracket(fmt, x);
      const Bracket want = sr_test::brute_bracket(members, x);
      if (got.lo != want.lo || got.hi != want.hi) {
        detail = fmt.to_string() + ": bracket mismatch at " + fmt_num(x);
        return false;
      }
      const RoundingMode& mode = modes[trial % modes.size()];
      const double rounded = round(fmt, mode, OverflowPolicy::Strict, x, key,
                                   static_cast<std::uint64_t>(trial));
      if (rounded != got.lo && rounded != got.hi) {
        detail = fmt.to_string() + ": " + mode.to_string() +
                 " left the bracket at " + fmt_num(x);
        return false;
      }
      ++checked;
    }
  }
  detail = std::to_string(formats.size()) + " formats, " +
           std::to_string(checked) + " random rounds";
  return true;
}

// ---------------------------------------------------------------------
// 6. Reproducibility: identical CLI invocations (same seed, any --threads)
//    produce byte-identical CSV and JSON outputs.
struct ToolRun {
  int code = -1;
  std::string output;
};

ToolRun run_tool(const std::string& args, const fs::path& capture) {
  const std::string cmd =
      g_tool + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, buf.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool criterion_reproducibility(std::string& detail) {
  const fs::path base = fs::temp_directory_path() /
                        ("sr-acceptance-" + std::to_string(getpid()));
  fs::create_directories(base);

  const std::string growth =
      "error-growth --format f5e10m --n 100,1000,10000 --modes rn,sr "
      "--trials 30 --seed 11 --out ";
  const std::string cond =
      "conditioning --format q4.8 --rows 40 --cols 5 --modes rn,sr "
      "--trials 50 --seed 11 --out ";
  const std::string pipe =
      "pipeline --format q4.8 --rows 60 --cols 4 --modes sr "
      "--trials 40 --seed 11 --out ";

  const fs::path g1 = base / "g1", g2 = base / "g2", g3 = base / "g3";
  const fs::path c1 = base / "c1", c2 = base / "c2";
  const fs::path p1 = base / "p1", p2 = base / "p2";
  if (run_tool(growth + g1.string(), base / "log1").code != 0 ||
      run_tool(growth + g2.string(), base / "log2").code != 0 ||
      run_tool(growth + g3.string() + " --threads 4", base / "log3").code != 0 ||
      run_tool(cond + c1.string(), base / "log4").code != 0 ||
      run_tool(cond + c2.string() + " --threads 3", base / "log5").code != 0 ||
      run_tool(pipe + p1.string(), base / "log6").code != 0 ||
      run_tool(pipe + p2.string() + " --threads 2", base / "log7").code != 0) {
    detail = "a tool invocation failed";
    return false;
  }

  const bool csv_same =
      slurp(g1 / "error_growth.csv") == slurp(g2 / "error_growth.csv") &&
      slurp(g1 / "error_growth.csv") == slurp(g3 / "error_growth.csv") &&
      slurp(c1 / "conditioning.csv") == slurp(c2 / "conditioning.csv") &&
      slurp(p1 / "pipeline.csv") == slurp(p2 / "pipeline.csv");
  const bool meta_same =
      slurp(g1 / "error_growth.meta.json") ==
          slurp(g2 / "error_growth.meta.json") &&
      slurp(g1 / "error_growth.meta.json") ==
          slurp(g3 / "error_growth.meta.json") &&
      slurp(c1 / "conditioning.meta.json") ==
          slurp(c2 / "conditioning.meta.json") &&
      slurp(p1 / "pipeline.meta.json") == slurp(p2 / "pipeline.meta.json");

  const ToolRun r1 = run_tool(
      "round --format f5e10m --mode sr --seed 42 --value 2049 --repeat 32",
      base / "r1");
  const ToolRun r2 = run_tool(
      "round --format f5e10m --mode sr --seed 42 --value 2049 --repeat 32",
      base / "r2");

  detail = std::string("csv ") + (csv_same ? "identical" : "DIFFER") +
           ", meta " + (meta_same ? "identical" : "DIFFER") + ", round " +
           (r1.output == r2.output ? "identical" : "DIFFER");
  return csv_same && meta_same && r1.code == 0 && r1.output == r2.output;
}

// ---------------------------------------------------------------------
// 7. Oracle integrity: Jacobi versus the 2x2 characteristic polynomial
//    and the Frobenius identity; lls_solve versus normal equations.
bool criterion_oracles(std::string& detail) {
  sr_test::TestRng rng(2026);
  double worst_sv = 0.0, worst_frob = 0.0, worst_lls = 0.0;

  for (int t = 0; t < 1000; ++t) {
    Matrix two(2, 2);
    for (double& v : two.data) v = rng.range(-2.0, 2.0);
    const auto [hi, lo] = sr_test::singular_values_2x2(two);
    const std::vector<double> got = singular_values(two);
    worst_sv = std::max(worst_sv, std::abs(got[0] - hi));
    worst_sv = std::max(worst_sv, std::abs(got[1] - lo));

    const int rows = 3 + t % 6, cols = 2 + t % 3;
    Matrix a(std::max(rows, cols), cols);
    for (double& v : a.data) v = rng.range(-1.0, 1.0);
    double sum_sq = 0.0;
    for (double s : singular_values(a)) sum_sq += s * s;
    const double frob_sq = frobenius_norm(a) * frobenius_norm(a);
    worst_frob = std::max(worst_frob, std::abs(sum_sq - frob_sq) / frob_sq);
  }

  for (int t = 0; t < 200; ++t) {
    Matrix a(50, 4);
    for (double& v : a.data) v = rng.range(-1.0, 1.0);
    std::vector<double> b(50);
    for (double& v : b) v = rng.range(-1.0, 1.0);
    const std::vector<double> qr = lls_solve(a, b);
    const std::vector<double> ne = sr_test::cholesky_solve(
        matmul(transpose(a), a), matvec(transpose(a), b));
    double diff = 0.0, norm = 0.0;
    for (size_t i = 0; i < qr.size(); ++i) {
      diff += (qr[i] - ne[i]) * (qr[i] - ne[i]);
      norm += qr[i] * qr[i];
    }
    worst_lls = std::max(worst_lls, std::sqrt(diff / norm));
  }

  detail = "max |jacobi - charpoly| " + fmt_num(worst_sv) +
           " (<=1e-10); max frobenius defect " + fmt_num(worst_frob) +
           " (<=1e-10); max qr/ne diff " + fmt_num(worst_lls) + " (<=1e-6)";
  return worst_sv <= 1e-10 && worst_frob <= 1e-10 && worst_lls <= 1e-6;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--tool") g_tool = argv[i + 1];

  run_criterion({1, "unbiasedness on the one-bit grid", 5}, criterion_unbiasedness);
  run_criterion({2, "stagnation at 2048 + 1000 x 0.5", 30}, criterion_stagnation);
  run_criterion({3, "error growth slope and rn/sr ratio", 300},
                criterion_error_growth);
  run_criterion({4, "conditioning of a duplicated-column matrix", 120},
                criterion_conditioning);
  run_criterion({5, "brute-force rounding rules, formats <= 12 bits", 60},
                criterion_brute_force);
  run_criterion({6, "byte-identical reproducibility", 60},
                criterion_reproducibility);
  run_criterion({7, "oracle integrity (jacobi, qr)", 60}, criterion_oracles);

  if (g_failures == 0)
    std::printf("all 7 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
