// sr-arith: command-line front end for the stochastic rounding library.
// One subcommand per experiment plus `round` and `singvals` for scripting.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sr/arith.hpp"
#include "sr/calibration.hpp"
#include "sr/csv.hpp"
#include "sr/errors.hpp"
#include "sr/experiments.hpp"
#include "sr/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> tokens;
  size_t start = 0;
  while (true) {
    const size_t comma = text.find(',', start);
    tokens.push_back(text.substr(
        start, comma == std::string::npos ? comma : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return tokens;
}

std::vector<sr::RoundingMode> parse_modes(const std::string& text) {
  std::vector<sr::RoundingMode> modes;
  for (const std::string& token : split_commas(text)) {
    if (token.empty())
      sr::raise(sr::ErrorKind::ParseError,
                "--modes '" + text + "': empty mode token");
    modes.push_back(sr::RoundingMode::parse(token));
  }
  return modes;
}

std::vector<long> parse_n_list(const std::string& text) {
  std::vector<long> ns;
  for (const std::string& token : split_commas(text)) {
    try {
      size_t used = 0;
      const long n = std::stol(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      ns.push_back(n);
    } catch (const std::exception&) {
      sr::raise(sr::ErrorKind::ParseError,
                "--n '" + text + "': cannot parse '" + token + "'");
    }
  }
  return ns;
}

sr::ErrorGrowthParams parse_distribution(const std::string& text,
                                         sr::ErrorGrowthParams params) {
  if (text == "uniform01") {
    params.distribution = sr::SummandDistribution::Uniform01;
  } else if (text.rfind("constant:", 0) == 0) {
    params.distribution = sr::SummandDistribution::Constant;
    params.constant_value =
        sr::parse_double(text.substr(9), "--dist '" + text + "'");
  } else {
    sr::raise(sr::ErrorKind::ParseError,
              "--dist '" + text + "': expected uniform01 or constant:<c>");
  }
  return params;
}

ordered_json modes_json(const std::vector<sr::RoundingMode>& modes) {
  ordered_json arr = ordered_json::array();
  for (const sr::RoundingMode& m : modes) arr.push_back(m.to_string());
  return arr;
}

ordered_json stats_json(const sr::SummaryStats& s) {
  return ordered_json{{"mean", s.mean},     {"std", s.std_dev},
                      {"median", s.median}, {"q05", s.q05},
                      {"q95", s.q95},       {"ci95", s.ci95_halfwidth},
                      {"trials", s.trials}};
}

ordered_json calibration_json() {
  return ordered_json{
      {"id", sr::calibration::kCalibrationId},
      {"error_growth_sr_slope_min", sr::calibration::kErrorGrowthSrSlopeMin},
      {"error_growth_sr_slope_max", sr::calibration::kErrorGrowthSrSlopeMax},
      {"error_growth_rn_over_sr_min",
       sr::calibration::kErrorGrowthRnOverSrMin},
      {"conditioning_sigma_min_threshold",
       sr::calibration::kConditioningSigmaMinThreshold},
      {"conditioning_frac_positive_min",
       sr::calibration::kConditioningFracPositiveMin},
  };
}

ordered_json meta_common(const char* experiment, const sr::ExperimentConfig& cfg) {
  ordered_json meta;
  meta["tool"] = sr::kToolName;
  meta["version"] = sr::kVersion;
  meta["experiment"] = experiment;
  meta["seed"] = cfg.seed;
  meta["format"] = cfg.fmt.to_string();
  meta["modes"] = modes_json(cfg.modes);
  meta["trials"] = cfg.trials;
  meta["calibration"] = calibration_json();
  return meta;
}

void write_outputs(const fs::path& out_dir, const std::string& name,
                   const sr::CsvTable& table, ordered_json meta) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    sr::raise(sr::ErrorKind::IoError,
              "cannot create output directory '" + out_dir.string() + "'");
  const fs::path csv_path = out_dir / (name + ".csv");
  sr::write_csv(table, csv_path);
  meta["outputs"] = ordered_json{{"csv", name + ".csv"}};
  const fs::path meta_path = out_dir / (name + ".meta.json");
  std::ofstream out(meta_path, std::ios::binary);
  if (!out)
    sr::raise(sr::ErrorKind::IoError,
              "cannot open '" + meta_path.string() + "' for write");
  out << meta.dump(2) << '\n';
  if (!out)
    sr::raise(sr::ErrorKind::IoError,
              "write failed for '" + meta_path.string() + "'");
}

std::string fd(double v) { return sr::format_double(v); }

struct CommonArgs {
  std::string format = "f5e10m";
  std::string modes = "rn,sr";
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 1;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, int default_trials,
                const char* default_format = "f5e10m") {
  args.format = default_format;
  args.trials = default_trials;
  cmd->add_option("--format", args.format,
                  "number format (f<e>e<m>m, fp16, bf16, q<i>.<f>, uq<i>.<f>)")
      ->capture_default_str();
  cmd->add_option("--modes", args.modes,
                  "comma-separated rounding modes (rn, sr, sr-updown, "
                  "sr-sel:<tau>)")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "rng seed (env: SR_SEED; flag wins)")
      ->envname("SR_SEED")
      ->capture_default_str();
  cmd->add_option("--trials", args.trials, "Monte-Carlo trials")
      ->capture_default_str();
  cmd->add_option("--threads", args.threads,
                  "worker threads for trials (never affects results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", args.out_dir, "output directory for CSV + meta")
      ->required();
}

sr::ExperimentConfig build_config(const CommonArgs& args) {
  sr::ExperimentConfig cfg;
  cfg.fmt = sr::FormatSpec::parse(args.format);
  cfg.modes = parse_modes(args.modes);
  cfg.seed = args.seed;
  cfg.trials = args.trials;
  cfg.threads = args.threads;
  return cfg;
}

int run_round(const std::string& format, const std::string& mode_str,
              const std::string& policy_str, std::uint64_t seed, double value,
              int repeat) {
  const sr::FormatSpec fmt = sr::FormatSpec::parse(format);
  const sr::RoundingMode mode = sr::RoundingMode::parse(mode_str);
  const sr::OverflowPolicy policy = sr::parse_policy(policy_str);
  const sr::RngKey key = sr::derive_stream(seed, {"round"});
  for (int i = 0; i < repeat; ++i)
    std::cout << fd(sr::round(fmt, mode, policy, value, key,
                              static_cast<std::uint64_t>(i)))
              << '\n';
  return 0;
}

int run_singvals(const std::string& input) {
  const sr::Matrix a = sr::load_matrix_csv(input);
  for (double s : sr::singular_values(a)) std::cout << fd(s) << '\n';
  return 0;
}

int run_unbiasedness_cmd(const CommonArgs& args, double x) {
  sr::ExperimentConfig cfg = build_config(args);
  cfg.unbiasedness.x = x;
  const sr::UnbiasednessResult result = sr::run_unbiasedness(cfg);

  sr::CsvTable table;
  table.header = {"mode", "trials", "mean_err", "std_err",
                  "median_err", "q05", "q95", "ci95"};
  for (const sr::UnbiasednessRow& row : result.rows)
    table.rows.push_back({row.mode.to_string(), std::to_string(row.error.trials),
                          fd(row.error.mean), fd(row.error.std_dev),
                          fd(row.error.median), fd(row.error.q05),
                          fd(row.error.q95), fd(row.error.ci95_halfwidth)});

  ordered_json meta = meta_common("unbiasedness", cfg);
  meta["params"] = ordered_json{{"x", result.x}};
  write_outputs(args.out_dir, "unbiasedness", table, std::move(meta));
  return 0;
}

int run_stagnation_cmd(const CommonArgs& args, double s0, double increment,
                       long k) {
  sr::ExperimentConfig cfg = build_config(args);
  cfg.stagnation = {s0, increment, k};
  const sr::StagnationResult result = sr::run_stagnation(cfg);
  if (!result.increment_below_half_gap)
    std::cerr << "warning: increment is not below half the gap at s0; "
                 "nearest-even stagnation is not guaranteed\n";

  sr::CsvTable table;
  table.header = {"mode", "trial_count", "mean_final", "std_final",
                  "expected_exact"};
  for (const sr::StagnationRow& row : result.rows)
    table.rows.push_back({row.mode.to_string(),
                          std::to_string(row.final_sum.trials),
                          fd(row.final_sum.mean), fd(row.final_sum.std_dev),
                          fd(result.expected_exact)});

  ordered_json meta = meta_common("stagnation", cfg);
  meta["params"] = ordered_json{{"s0", s0},
                                {"increment", increment},
                                {"k", k},
                                {"increment_below_half_gap",
                                 result.increment_below_half_gap}};
  write_outputs(args.out_dir, "stagnation", table, std::move(meta));
  return 0;
}

int run_error_growth_cmd(const CommonArgs& args, const std::string& n_text,
                         const std::string& dist_text) {
  sr::ExperimentConfig cfg = build_config(args);
  cfg.error_growth.n_list = parse_n_list(n_text);
  cfg.error_growth = parse_distribution(dist_text, cfg.error_growth);
  const sr::ErrorGrowthResult result = sr::run_error_growth(cfg);

  sr::CsvTable table;
  table.header = {"experiment", "mode", "n", "trials",
                  "median_err", "rms_err", "mean_signed_err", "ci95"};
  for (const sr::ErrorGrowthCell& cell : result.cells)
    table.rows.push_back({"error-growth", cell.mode.to_string(),
                          std::to_string(cell.n), std::to_string(cell.trials),
                          fd(cell.median_err), fd(cell.rms_err),
                          fd(cell.mean_signed_err), fd(cell.ci95_halfwidth)});

  ordered_json meta = meta_common("error-growth", cfg);
  ordered_json params;
  params["n_list"] = cfg.error_growth.n_list;
  params["distribution"] =
      cfg.error_growth.distribution == sr::SummandDistribution::Uniform01
          ? "uniform01"
          : "constant";
  if (cfg.error_growth.distribution == sr::SummandDistribution::Constant)
    params["constant_value"] = cfg.error_growth.constant_value;
  meta["params"] = params;
  meta["normalization"] = "abs(computed - exact) / (unit_roundoff * sum_abs)";
  meta["unit_roundoff"] = result.unit_roundoff_value;
  ordered_json fits = ordered_json::array();
  for (const sr::ErrorGrowthFit& fit : result.fits) {
    ordered_json entry;
    entry["mode"] = fit.mode.to_string();
    if (fit.fit) {
      entry["slope"] = fit.fit->slope;
      entry["std_error"] = fit.fit->std_error;
    } else {
      entry["slope"] = nullptr;
    }
    fits.push_back(entry);
  }
  meta["fits"] = fits;
  write_outputs(args.out_dir, "error_growth", table, std::move(meta));
  return 0;
}

int run_conditioning_cmd(const CommonArgs& args, int rows, int cols,
                         bool dup_column) {
  sr::ExperimentConfig cfg = build_config(args);
  cfg.conditioning = {rows, cols, dup_column};
  const sr::ConditioningResult result = sr::run_conditioning(cfg);

  sr::CsvTable table;
  table.header = {"mode", "sigma_min_before", "median_sigma_min_after",
                  "q05", "q95", "frac_positive"};
  for (const sr::ConditioningRow& row : result.rows)
    table.rows.push_back({row.mode.to_string(), fd(result.sigma_min_before),
                          fd(row.sigma_min_after.median),
                          fd(row.sigma_min_after.q05),
                          fd(row.sigma_min_after.q95),
                          fd(row.frac_positive)});

  ordered_json meta = meta_common("conditioning", cfg);
  meta["params"] =
      ordered_json{{"rows", rows},
                   {"cols", cols},
                   {"near_rank_deficiency", dup_column},
                   {"positive_threshold", result.positive_threshold}};
  write_outputs(args.out_dir, "conditioning", table, std::move(meta));
  return 0;
}

int run_pipeline_cmd(const CommonArgs& args, int rows, int cols) {
  sr::ExperimentConfig cfg = build_config(args);
  cfg.pipeline = {rows, cols};
  const sr::PipelineResult result = sr::run_pipeline_comparison(cfg);

  sr::CsvTable table;
  table.header = {"mode", "pipeline", "trials", "rank_deficient_trials",
                  "mean_err", "median_err", "q05", "q95", "ci95"};
  for (const sr::PipelineRow& row : result.rows)
    table.rows.push_back(
        {row.mode.to_string(), sr::pipeline_to_string(row.pipeline),
         std::to_string(row.rel_error.trials),
         std::to_string(row.rank_deficient_trials), fd(row.rel_error.mean),
         fd(row.rel_error.median), fd(row.rel_error.q05),
         fd(row.rel_error.q95), fd(row.rel_error.ci95_halfwidth)});

  ordered_json meta = meta_common("pipeline", cfg);
  meta["params"] = ordered_json{{"rows", rows}, {"cols", cols}};
  write_outputs(args.out_dir, "pipeline", table, std::move(meta));
  return 0;
}

int exit_code_for(const sr::Error& e) {
  switch (e.kind()) {
    case sr::ErrorKind::ParseError:
    case sr::ErrorKind::ConfigError:
    case sr::ErrorKind::InvalidInput:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic rounding emulation and experiments"};
  app.set_version_flag("--version", std::string(sr::kToolName) + " " + sr::kVersion);
  app.require_subcommand(1);

  // round
  auto* round_cmd =
      app.add_subcommand("round", "round one value repeatedly, one result "
                                  "per line");
  std::string round_format = "f5e10m", round_mode = "sr",
              round_policy = "strict";
  std::uint64_t round_seed = 0;
  double round_value = 0.0;
  int round_repeat = 1;
  round_cmd->add_option("--format", round_format, "number format")
      ->capture_default_str();
  round_cmd->add_option("--mode", round_mode, "rounding mode")
      ->capture_default_str();
  round_cmd->add_option("--policy", round_policy, "strict | saturate")
      ->capture_default_str();
  round_cmd->add_option("--seed", round_seed, "rng seed (env: SR_SEED)")
      ->envname("SR_SEED")
      ->capture_default_str();
  round_cmd->add_option("--value", round_value, "value to round")->required();
  round_cmd->add_option("--repeat", round_repeat, "number of output lines")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // singvals
  auto* singvals_cmd = app.add_subcommand(
      "singvals", "singular values of a CSV matrix, one per line");
  std::string singvals_input;
  singvals_cmd->add_option("--input", singvals_input, "matrix CSV path")
      ->required();

  // unbiasedness
  auto* unbias_cmd = app.add_subcommand(
      "unbiasedness", "distribution of round(x) - x per mode");
  CommonArgs unbias_args;
  double unbias_x = 0.7;
  add_common(unbias_cmd, unbias_args, 1000000, "uq1.0");
  unbias_cmd->add_option("--x", unbias_x, "value to round")
      ->capture_default_str();

  // stagnation
  auto* stagnation_cmd = app.add_subcommand(
      "stagnation", "repeated tiny increments against a large base");
  CommonArgs stagnation_args;
  double stag_s0 = 2048.0, stag_inc = 0.5;
  long stag_k = 1000;
  add_common(stagnation_cmd, stagnation_args, 1000);
  stagnation_cmd->add_option("--s0", stag_s0, "starting value (in F)")
      ->capture_default_str();
  stagnation_cmd->add_option("--inc", stag_inc, "increment (in F)")
      ->capture_default_str();
  stagnation_cmd->add_option("--k", stag_k, "number of increments")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // error-growth
  auto* growth_cmd = app.add_subcommand(
      "error-growth", "normalized summation error versus n per mode");
  CommonArgs growth_args;
  std::string growth_n = "1000,3000,10000,30000,100000";
  std::string growth_dist = "uniform01";
  add_common(growth_cmd, growth_args, 100);
  growth_cmd->add_option("--n", growth_n, "comma-separated summand counts")
      ->capture_default_str();
  growth_cmd->add_option("--dist", growth_dist,
                         "summand distribution: uniform01 | constant:<c>")
      ->capture_default_str();

  // conditioning
  auto* cond_cmd = app.add_subcommand(
      "conditioning", "sigma_min before/after grid quantization");
  CommonArgs cond_args;
  int cond_rows = 200, cond_cols = 5;
  bool cond_dup = true;
  add_common(cond_cmd, cond_args, 1000, "q4.8");
  cond_cmd->add_option("--rows", cond_rows, "matrix rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cond_cmd->add_option("--cols", cond_cols, "matrix cols")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cond_cmd->add_flag("--dup-column,!--no-dup-column", cond_dup,
                     "duplicate one column (near rank deficiency)")
      ->capture_default_str();

  // pipeline
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "input-only versus full rounded least-squares solve");
  CommonArgs pipeline_args;
  int pipe_rows = 100, pipe_cols = 4;
  add_common(pipeline_cmd, pipeline_args, 100, "q4.8");
  pipeline_cmd->add_option("--rows", pipe_rows, "matrix rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pipeline_cmd->add_option("--cols", pipe_cols, "matrix cols")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*round_cmd)
      return run_round(round_format, round_mode, round_policy, round_seed,
                       round_value, round_repeat);
    if (*singvals_cmd) return run_singvals(singvals_input);
    if (*unbias_cmd) return run_unbiasedness_cmd(unbias_args, unbias_x);
    if (*stagnation_cmd)
      return run_stagnation_cmd(stagnation_args, stag_s0, stag_inc, stag_k);
    if (*growth_cmd)
      return run_error_growth_cmd(growth_args, growth_n, growth_dist);
    if (*cond_cmd)
      return run_conditioning_cmd(cond_args, cond_rows, cond_cols, cond_dup);
    if (*pipeline_cmd)
      return run_pipeline_cmd(pipeline_args, pipe_rows, pipe_cols);
  } catch (const sr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
