// Copyright 2026 The mgdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"
#include "mgdp/accounting.hpp"
#include "mgdp/matrix.hpp"

namespace mgdp {
namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
  std::string error;
};

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string base =
      std::string(::testing::TempDir()) + "mgdp_cli_" + std::to_string(counter++);
  const std::string cmd = std::string(MGDP_CLI_PATH) + " " + args + " > " + base + ".out 2> " +
                          base + ".err";
  const int status = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  result.output = slurp(base + ".out");
  result.error = slurp(base + ".err");
  return result;
}

nlohmann::json parse_report(const std::string& text) { return nlohmann::json::parse(text); }

TEST(CliCalibrate, AmgmReport) {
  const CommandResult r =
      run_cli("calibrate --mechanism amgm --epsilon 8 --delta 1e-5 --s2 2");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const auto report = parse_report(r.output);
  EXPECT_DOUBLE_EQ(report["epsilon"].get<double>(), 8.0);
  EXPECT_DOUBLE_EQ(report["delta"].get<double>(), 1e-5);
  EXPECT_DOUBLE_EQ(report["sensitivity"].get<double>(), 2.0);
  EXPECT_EQ(report["notion"], "sequence-level");
  EXPECT_EQ(report["mechanism"], "amgm");
  EXPECT_TRUE(report["warnings"].empty());
  const double sigma = report["sigma"].get<double>();
  EXPECT_GT(sigma * sigma, 0.2);
  EXPECT_LT(sigma * sigma, 2.0);
  EXPECT_NEAR(report["B"].get<double>() * sigma, 2.0, 1e-9);
}

TEST(CliCalibrate, ClassicalGmWithWarning) {
  const CommandResult ok = run_cli("calibrate --mechanism gm --epsilon 1 --delta 1e-5 --s2 1");
  ASSERT_EQ(ok.exit_code, 0) << ok.error;
  const auto report = parse_report(ok.output);
  EXPECT_NEAR(report["sigma"].get<double>(), std::sqrt(2.0 * std::log(1.25e5)), 1e-9);
  EXPECT_TRUE(report["warnings"].empty());

  const CommandResult warned =
      run_cli("calibrate --mechanism gm --epsilon 2 --delta 1e-5 --s2 1");
  ASSERT_EQ(warned.exit_code, 0);
  EXPECT_FALSE(parse_report(warned.output)["warnings"].empty());
  EXPECT_NE(warned.error.find("warning"), std::string::npos);
}

TEST(CliCalibrate, MvgReport) {
  const CommandResult r = run_cli(
      "calibrate --mechanism mvg --epsilon 8 --delta 1e-5 --s2 2 --n 128 --d 768 --gamma 1");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const double sigma = parse_report(r.output)["sigma"].get<double>();
  EXPECT_GT(sigma * sigma, 1e8);
}

TEST(CliCalibrate, UsageErrors) {
  EXPECT_EQ(run_cli("calibrate --mechanism amgm --epsilon 8 --s2 2").exit_code, 2);
  EXPECT_EQ(run_cli("calibrate --mechanism mvg --epsilon 8 --delta 1e-5 --s2 2").exit_code, 2);
  EXPECT_EQ(run_cli("calibrate --mechanism nope --epsilon 8 --delta 1e-5 --s2 2").exit_code, 2);
  EXPECT_EQ(run_cli("calibrate --mechanism gm --epsilon 0 --delta 1e-5 --s2 1").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
}

TEST(CliSample, DeterministicAndRoundTrips) {
  const std::string path_a = std::string(::testing::TempDir()) + "noise_a.mat";
  const std::string path_b = std::string(::testing::TempDir()) + "noise_b.mat";
  const std::string flags =
      "sample --epsilon 1 --delta 1e-5 --s2 1 --rows 4 --cols 3 --seed 9 --out ";
  ASSERT_EQ(run_cli(flags + path_a).exit_code, 0);
  ASSERT_EQ(run_cli(flags + path_b).exit_code, 0);

  const auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  EXPECT_EQ(slurp(path_a), slurp(path_b));
  EXPECT_FALSE(slurp(path_a).empty());

  const Matrix noise = read_matrix_file(path_a);
  EXPECT_EQ(noise.rows(), 4);
  EXPECT_EQ(noise.cols(), 3);
}

TEST(CliSample, NearZeroSensitivityGivesNearZeroNoise) {
  const std::string path = std::string(::testing::TempDir()) + "noise_tiny.mat";
  ASSERT_EQ(run_cli("sample --epsilon 1 --delta 1e-5 --s2 1e-12 --rows 2 --cols 2 --out " +
                    path)
                .exit_code,
            0);
  const Matrix noise = read_matrix_file(path);
  for (double v : noise.data()) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(CliSample, IoErrorExitCode) {
  EXPECT_EQ(run_cli("sample --epsilon 1 --delta 1e-5 --s2 1 --rows 2 --cols 2 --out "
                    "/nonexistent-dir/x.mat")
                .exit_code,
            4);
}

TEST(CliVerify, PassAndFail) {
  const CommandResult pass =
      run_cli("verify --epsilon 1 --delta 1e-3 --s2 1 --trials 50000 --seed 11");
  ASSERT_EQ(pass.exit_code, 0) << pass.output << pass.error;
  const auto report = parse_report(pass.output);
  EXPECT_EQ(report["verdict"], "PASS");
  EXPECT_LE(report["closed_form_delta"].get<double>(), 1e-3 + 1e-9);

  // Shrinking sigma 5% below the calibrated value must fail verification.
  const double sigma = report["sigma"].get<double>();
  std::ostringstream cmd;
  cmd << "verify --epsilon 1 --delta 1e-3 --s2 1 --trials 50000 --seed 11 --sigma-override "
      << format_full_precision(0.95 * sigma);
  const CommandResult fail = run_cli(cmd.str());
  EXPECT_EQ(fail.exit_code, 5);
  EXPECT_EQ(parse_report(fail.output)["verdict"], "FAIL");
}

TEST(CliVerify, TooFewTrialsIsUsageError) {
  EXPECT_EQ(run_cli("verify --epsilon 1 --delta 1e-3 --s2 1 --trials 100").exit_code, 2);
}

TEST(CliCompose, SelfCompositionMatchesLibrary) {
  const CommandResult one =
      run_cli("compose --k 1 --sigma 1.2 --s2 1 --delta 1e-5");
  ASSERT_EQ(one.exit_code, 0) << one.error;
  const double eps_one = parse_report(one.output)["epsilon"].get<double>();
  EXPECT_NEAR(eps_one, epsilon_for_delta(1.2, 1.0, 1e-5), 1e-9);

  // k = 4 at sigma equals k = 1 at sigma / 2.
  const CommandResult four = run_cli("compose --k 4 --sigma 1.2 --s2 1 --delta 1e-5");
  const CommandResult half = run_cli("compose --k 1 --sigma 0.6 --s2 1 --delta 1e-5");
  ASSERT_EQ(four.exit_code, 0);
  ASSERT_EQ(half.exit_code, 0);
  EXPECT_NEAR(parse_report(four.output)["epsilon"].get<double>(),
              parse_report(half.output)["epsilon"].get<double>(), 1e-9);
}

TEST(CliCompose, LedgerComposition) {
  const std::string path = std::string(::testing::TempDir()) + "ledger.txt";
  {
    std::ofstream out(path);
    out << "amgm 1 1e-5\nrr 0.03 0\n";
  }
  const CommandResult r = run_cli("compose --ledger " + path);
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const auto report = parse_report(r.output);
  EXPECT_NEAR(report["epsilon"].get<double>(), 1.03, 1e-12);
  EXPECT_NEAR(report["delta"].get<double>(), 1e-5, 1e-15);
  EXPECT_EQ(report["entries"].get<int>(), 2);
}

TEST(CliCompose, SolverFailureExitCode) {
  // A sensitivity-to-noise ratio of 1e15 needs an epsilon beyond the
  // solver's bracket cap.
  EXPECT_EQ(run_cli("compose --k 1 --sigma 1e-15 --s2 1 --delta 1e-5").exit_code, 3);
}

TEST(CliCompose, MalformedLedgerIsUsageError) {
  const std::string path = std::string(::testing::TempDir()) + "ledger_bad.txt";
  {
    std::ofstream out(path);
    out << "amgm one 1e-5\n";
  }
  EXPECT_EQ(run_cli("compose --ledger " + path).exit_code, 2);
  EXPECT_EQ(run_cli("compose --ledger /nonexistent-dir/ledger.txt").exit_code, 4);
}

TEST(CliDemoInvert, NoiselessRecallAndDeterminism) {
  const std::string flags =
      "demo-invert --vocab 100 --dim 8 --len 6 --epsilons inf,4 --seeds 5";
  const CommandResult first = run_cli(flags);
  ASSERT_EQ(first.exit_code, 0) << first.error;
  std::istringstream lines(first.output);
  std::string eps;
  double recall = -1.0, std_err = -1.0;
  int n_seeds = 0;
  lines >> eps >> recall >> std_err >> n_seeds;
  EXPECT_EQ(eps, "inf");
  EXPECT_DOUBLE_EQ(recall, 1.0);
  EXPECT_EQ(n_seeds, 5);

  const CommandResult second = run_cli(flags);
  EXPECT_EQ(first.output, second.output);
}

TEST(CliDemoInvert, InvalidDimsAreUsageErrors) {
  EXPECT_EQ(
      run_cli("demo-invert --vocab 20000 --dim 8 --len 6 --epsilons 1 --seeds 2").exit_code,
      2);
  EXPECT_EQ(
      run_cli("demo-invert --vocab 100 --dim 999 --len 6 --epsilons 1 --seeds 2").exit_code,
      2);
  EXPECT_EQ(run_cli("demo-invert --vocab 100 --dim 8 --len 6 --epsilons nope --seeds 2")
                .exit_code,
            2);
}

TEST(CliConfigFile, FlagsFromConfig) {
  const std::string path = std::string(::testing::TempDir()) + "mgdp.conf";
  {
    std::ofstream out(path);
    out << "[calibrate]\nmechanism=amgm\nepsilon=8\ndelta=1e-5\ns2=2\n";
  }
  const CommandResult r = run_cli("--config " + path + " calibrate");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  EXPECT_EQ(parse_report(r.output)["mechanism"], "amgm");
}

}  // namespace
}  // namespace mgdp
