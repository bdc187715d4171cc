#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "sr/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  static const fs::path dir =
      fs::temp_directory_path() / ("sr-cli-tests-" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir;
}

RunResult run_tool(const std::string& args, const std::string& env = "") {
  static int invocation = 0;
  const fs::path out = work_dir() / ("stdout." + std::to_string(invocation));
  const fs::path err = work_dir() / ("stderr." + std::to_string(invocation));
  ++invocation;
  std::string cmd = env.empty() ? std::string() : env + " ";
  cmd += std::string(SR_ARITH_BIN) + " " + args + " > " + out.string() +
         " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out);
  result.err = read_file(err);
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("round subcommand: bracket endpoints, determinism") {
  const std::string args =
      "round --format f5e10m --mode sr --seed 42 --value 2049 --repeat 10";
  const RunResult first = run_tool(args);
  REQUIRE(first.code == 0);
  const std::vector<std::string> values = lines_of(first.out);
  REQUIRE(values.size() == 10);
  for (const std::string& v : values) CHECK((v == "2048" || v == "2050"));

  const RunResult second = run_tool(args);
  CHECK(second.out == first.out);
}

TEST_CASE("help exits 0 for the app and every subcommand") {
  CHECK(run_tool("--help").code == 0);
  for (const std::string sub : {"round", "unbiasedness", "stagnation",
                                "error-growth", "conditioning", "pipeline",
                                "singvals"})
    CHECK(run_tool(sub + " --help").code == 0);
}

TEST_CASE("usage errors exit 2 and name the problem") {
  const RunResult unknown =
      run_tool("round --value 1 --no-such-flag 3");
  CHECK(unknown.code == 2);

  const RunResult bad_format =
      run_tool("round --format f5e10 --value 1");
  CHECK(bad_format.code == 2);
  CHECK(bad_format.err.find("f5e10") != std::string::npos);

  const RunResult bad_mode = run_tool("round --mode nearest --value 1");
  CHECK(bad_mode.code == 2);
  CHECK(bad_mode.err.find("nearest") != std::string::npos);

  const RunResult missing = run_tool("round");
  CHECK(missing.code == 2);

  const RunResult bad_sub = run_tool("frobnicate");
  CHECK(bad_sub.code == 2);

  const RunResult low_trials = run_tool(
      "unbiasedness --trials 10 --out " + (work_dir() / "lt").string());
  CHECK(low_trials.code == 2);
  CHECK(low_trials.err.find("trials") != std::string::npos);
}

TEST_CASE("runtime errors exit 1") {
  const RunResult overflow = run_tool(
      "round --format f5e10m --mode rn --policy strict --value 70000");
  CHECK(overflow.code == 1);
  CHECK(overflow.err.find("70000") != std::string::npos);

  const RunResult saturated = run_tool(
      "round --format f5e10m --mode rn --policy saturate --value 70000");
  CHECK(saturated.code == 0);
  CHECK(lines_of(saturated.out).at(0) == "65504");

  const RunResult missing_input =
      run_tool("singvals --input /nonexistent/matrix.csv");
  CHECK(missing_input.code == 1);
}

TEST_CASE("SR_SEED environment variable feeds the seed, flag wins") {
  const std::string args = "round --format uq1.0 --value 0.5 --repeat 8";
  const RunResult fixed = run_tool(args + " --seed 42");
  const RunResult from_env = run_tool(args, "SR_SEED=42");
  CHECK(from_env.out == fixed.out);

  const RunResult flag_wins = run_tool(args + " --seed 42", "SR_SEED=1");
  CHECK(flag_wins.out == fixed.out);

  const RunResult other_seed = run_tool(args, "SR_SEED=1");
  CHECK(other_seed.out != fixed.out);
}

TEST_CASE("stagnation CSV shows exact rn stagnation") {
  const fs::path out = work_dir() / "stag";
  const RunResult run = run_tool(
      "stagnation --format f5e10m --s0 2048 --inc 0.5 --k 1000 "
      "--modes rn,sr --trials 100 --seed 7 --out " + out.string());
  REQUIRE(run.code == 0);
  const std::vector<std::string> rows =
      lines_of(read_file(out / "stagnation.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "mode,trial_count,mean_final,std_final,expected_exact");
  CHECK(rows[1] == "rn,100,2048,0,2548");
}

TEST_CASE("error-growth writes csv plus meta and reruns byte-identically") {
  const std::string config =
      "error-growth --format f5e10m --n 100,1000,10000 --modes rn,sr "
      "--trials 30 --seed 9 --out ";
  const fs::path out_a = work_dir() / "growth-a";
  const fs::path out_b = work_dir() / "growth-b";
  REQUIRE(run_tool(config + out_a.string()).code == 0);
  REQUIRE(run_tool(config + out_b.string() + " --threads 3").code == 0);

  const std::string csv_a = read_file(out_a / "error_growth.csv");
  CHECK(!csv_a.empty());
  CHECK(csv_a == read_file(out_b / "error_growth.csv"));
  CHECK(read_file(out_a / "error_growth.meta.json") ==
        read_file(out_b / "error_growth.meta.json"));
  CHECK(read_file(out_a / "error_growth.meta.json").find("\"seed\": 9") !=
        std::string::npos);
}

TEST_CASE("singvals prints the spectrum of a csv matrix") {
  const fs::path matrix_path = work_dir() / "diag.csv";
  sr::save_matrix_csv(
      sr::Matrix(3, 2, {3.0, 0.0, 0.0, 2.0, 0.0, 0.0}), matrix_path);
  const RunResult run = run_tool("singvals --input " + matrix_path.string());
  REQUIRE(run.code == 0);
  const std::vector<std::string> values = lines_of(run.out);
  REQUIRE(values.size() == 2);
  CHECK(values[0] == "3");
  CHECK(values[1] == "2");
}

TEST_CASE("output directories are created on demand") {
  const fs::path deep = work_dir() / "deep" / "nested" / "dir";
  const RunResult run = run_tool(
      "conditioning --format q4.8 --rows 40 --cols 5 --modes sr --trials 30 "
      "--seed 3 --out " + deep.string());
  REQUIRE(run.code == 0);
  CHECK(fs::exists(deep / "conditioning.csv"));
  CHECK(fs::exists(deep / "conditioning.meta.json"));
}
