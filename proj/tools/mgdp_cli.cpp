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
//
// Command-line front end: calibration, noise sampling, DP verification,
// composition accounting, and the embedding-inversion demo.
//
// Exit codes: 0 success, 2 usage/validation error, 3 solver failure,
// 4 I/O failure, 5 verification failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mgdp/mgdp.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;
constexpr int kExitVerifyFailed = 5;

// Every invocation is a pure function of its flags; output goes to --out or
// standard output.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw mgdp::IoError("cannot open output file: " + out_path);
  out << text;
  if (!out) throw mgdp::IoError("write failed: " + out_path);
}

struct CalibrateArgs {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  double s2 = 0.0;
  std::string notion = "sequence-level";
  int n = 0;
  int d = 0;
  double gamma = 0.0;
  std::string out;
};

int run_calibrate(const CalibrateArgs& args) {
  const mgdp::PrivacyBudget budget{args.epsilon, args.delta};
  const mgdp::SensitivityBound sensitivity{args.s2, mgdp::notion_from_string(args.notion),
                                           "cli"};
  mgdp::CalibrationReport report;
  if (args.mechanism == "amgm") {
    report = mgdp::make_report(mgdp::amgm_calibrate(sensitivity, budget), "amgm");
  } else if (args.mechanism == "gm") {
    sensitivity.validate();
    const double sigma = mgdp::classical_gm_sigma(args.s2, budget);
    report = {args.epsilon, args.delta,    args.s2, args.notion,
              args.s2 / sigma, sigma, "gm", {}};
    if (mgdp::classical_gm_out_of_range(budget)) {
      report.warnings.push_back(mgdp::kClassicalGmWarning);
    }
  } else if (args.mechanism == "mvg") {
    if (args.n < 1 || args.d < 1 || !(args.gamma > 0.0)) {
      throw std::invalid_argument("mvg calibration needs --n, --d and --gamma");
    }
    sensitivity.validate();
    const mgdp::MvgParams params{args.n, args.d, args.gamma, args.s2, budget};
    const double sigma = mgdp::mvg_iid_sigma(params);
    report = {args.epsilon, args.delta,    args.s2, args.notion,
              args.s2 / sigma, sigma, "mvg", {}};
  } else {
    throw std::invalid_argument("unknown mechanism: " + args.mechanism);
  }
  for (const std::string& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  emit(args.out, report.to_json());
  return 0;
}

struct SampleArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  double s2 = 0.0;
  std::string notion = "sequence-level";
  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 42;
  std::string out;
};

int run_sample(const SampleArgs& args) {
  const mgdp::GaussianCalibration calibration = mgdp::amgm_calibrate(
      {args.s2, mgdp::notion_from_string(args.notion), "cli"}, {args.epsilon, args.delta});
  mgdp::RandomStream stream(args.seed);
  const mgdp::Matrix noise = mgdp::amgm_sample(calibration, args.rows, args.cols, stream);
  std::ostringstream buffer;
  mgdp::write_matrix(buffer, noise);
  emit(args.out, buffer.str());
  return 0;
}

struct VerifyArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  double s2 = 0.0;
  std::string notion = "sequence-level";
  std::int64_t trials = 0;
  std::uint64_t seed = 42;
  double sigma_override = 0.0;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  if (args.trials < 10000) {
    throw std::invalid_argument("--trials must be at least 10000");
  }
  const mgdp::GaussianCalibration calibration = mgdp::amgm_calibrate(
      {args.s2, mgdp::notion_from_string(args.notion), "cli"}, {args.epsilon, args.delta});
  const double sigma = args.sigma_override > 0.0 ? args.sigma_override : calibration.sigma;

  const double closed_form = mgdp::delta_for_epsilon(sigma, args.s2, args.epsilon);
  mgdp::RandomStream stream(args.seed);
  const mgdp::DeltaEstimate estimate =
      mgdp::monte_carlo_delta_estimate(sigma, args.s2, args.epsilon, args.trials, stream);

  const bool pass = estimate.delta_hat <= args.delta + 4.0 * estimate.std_err &&
                    closed_form <= args.delta + 1e-9;

  std::string text = "{\n";
  text += "  \"epsilon\": " + mgdp::format_real(args.epsilon) + ",\n";
  text += "  \"delta\": " + mgdp::format_real(args.delta) + ",\n";
  text += "  \"sensitivity\": " + mgdp::format_real(args.s2) + ",\n";
  text += "  \"notion\": \"" + args.notion + "\",\n";
  text += "  \"B\": " + mgdp::format_real(args.s2 / sigma) + ",\n";
  text += "  \"sigma\": " + mgdp::format_real(sigma) + ",\n";
  text += "  \"mechanism\": \"amgm\",\n";
  text += "  \"closed_form_delta\": " + mgdp::format_real(closed_form) + ",\n";
  text += "  \"delta_hat\": " + mgdp::format_real(estimate.delta_hat) + ",\n";
  text += "  \"std_err\": " + mgdp::format_real(estimate.std_err) + ",\n";
  text += "  \"trials\": " + std::to_string(args.trials) + ",\n";
  text += std::string("  \"verdict\": \"") + (pass ? "PASS" : "FAIL") + "\",\n";
  text += "  \"warnings\": []\n}\n";
  emit(args.out, text);
  return pass ? 0 : kExitVerifyFailed;
}

struct ComposeArgs {
  int k = 0;
  double sigma = 0.0;
  double s2 = 0.0;
  double delta = 0.0;
  std::string ledger;
  std::string out;
};

int run_compose(const ComposeArgs& args) {
  std::string text;
  if (!args.ledger.empty()) {
    std::ifstream in(args.ledger);
    if (!in) throw mgdp::IoError("cannot open ledger: " + args.ledger);
    const mgdp::CompositionLedger ledger = mgdp::parse_ledger(in);
    const mgdp::ComposedBudget total = mgdp::compose_basic(ledger);
    text = "{\n";
    text += "  \"mechanism\": \"basic-composition\",\n";
    text += "  \"entries\": " + std::to_string(ledger.entries.size()) + ",\n";
    text += "  \"epsilon\": " + mgdp::format_real(total.epsilon) + ",\n";
    text += "  \"delta\": " + mgdp::format_real(total.delta) + "\n}\n";
  } else {
    if (args.k < 1 || !(args.sigma > 0.0) || !(args.s2 > 0.0)) {
      throw std::invalid_argument("self-composition needs --k, --sigma, --s2, --delta");
    }
    const double epsilon =
        mgdp::compose_gaussian_self(args.k, args.sigma, args.s2, args.delta);
    text = "{\n";
    text += "  \"mechanism\": \"gaussian-self-composition\",\n";
    text += "  \"k\": " + std::to_string(args.k) + ",\n";
    text += "  \"sigma\": " + mgdp::format_real(args.sigma) + ",\n";
    text += "  \"sensitivity\": " + mgdp::format_real(args.s2) + ",\n";
    text += "  \"delta\": " + mgdp::format_real(args.delta) + ",\n";
    text += "  \"epsilon\": " + mgdp::format_real(epsilon) + "\n}\n";
  }
  emit(args.out, text);
  return 0;
}

struct DemoArgs {
  int vocab = 0;
  int dim = 0;
  int len = 0;
  std::vector<std::string> epsilons;
  int seeds = 0;
  double delta = 1e-5;
  double clip_c = 1.0;
  std::uint64_t seed = 42;
  std::string out;
};

int run_demo_invert(const DemoArgs& args) {
  mgdp::InversionDemoConfig config;
  config.vocab = args.vocab;
  config.dim = args.dim;
  config.len = args.len;
  config.n_seeds = args.seeds;
  config.delta = args.delta;
  config.clip_c = args.clip_c;
  config.seed = args.seed;
  for (const std::string& token : args.epsilons) {
    if (token == "inf") {
      config.epsilons.push_back(std::numeric_limits<double>::infinity());
    } else {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad epsilon value: " + token);
      }
      if (used != token.size()) {
        throw std::invalid_argument("bad epsilon value: " + token);
      }
      config.epsilons.push_back(value);
    }
  }
  const std::vector<mgdp::RecallRow> rows = mgdp::run_inversion_experiment(config);
  emit(args.out, mgdp::format_recall_table(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix Gaussian noise calibration, accounting and verification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from a config file");

  CalibrateArgs calibrate_args;
  CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate a mechanism's noise scale");
  calibrate->add_option("--mechanism", calibrate_args.mechanism, "amgm | gm | mvg")
      ->required()
      ->check(CLI::IsMember({"amgm", "gm", "mvg"}));
  calibrate->add_option("--epsilon", calibrate_args.epsilon)->required();
  calibrate->add_option("--delta", calibrate_args.delta)->required();
  calibrate->add_option("--s2", calibrate_args.s2, "L2-sensitivity")->required();
  calibrate->add_option("--notion", calibrate_args.notion, "sequence-level | token-level");
  calibrate->add_option("--n", calibrate_args.n, "rows (mvg)");
  calibrate->add_option("--d", calibrate_args.d, "cols (mvg)");
  calibrate->add_option("--gamma", calibrate_args.gamma, "sup of ||f||_F (mvg)");
  calibrate->add_option("--out", calibrate_args.out);

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "draw a calibrated noise matrix");
  sample->add_option("--epsilon", sample_args.epsilon)->required();
  sample->add_option("--delta", sample_args.delta)->required();
  sample->add_option("--s2", sample_args.s2)->required();
  sample->add_option("--notion", sample_args.notion);
  sample->add_option("--rows", sample_args.rows)->required();
  sample->add_option("--cols", sample_args.cols)->required();
  sample->add_option("--seed", sample_args.seed);
  sample->add_option("--out", sample_args.out);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo check of the DP guarantee");
  verify->add_option("--epsilon", verify_args.epsilon)->required();
  verify->add_option("--delta", verify_args.delta)->required();
  verify->add_option("--s2", verify_args.s2)->required();
  verify->add_option("--notion", verify_args.notion);
  verify->add_option("--trials", verify_args.trials)->required();
  verify->add_option("--seed", verify_args.seed);
  verify
      ->add_option("--sigma-override", verify_args.sigma_override,
                   "replace the calibrated sigma (for failure injection)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", verify_args.out);

  ComposeArgs compose_args;
  CLI::App* compose = app.add_subcommand("compose", "privacy accounting");
  CLI::Option* compose_k =
      compose->add_option("--k", compose_args.k, "number of identical Gaussian releases");
  CLI::Option* compose_sigma = compose->add_option("--sigma", compose_args.sigma);
  CLI::Option* compose_s2 = compose->add_option("--s2", compose_args.s2);
  CLI::Option* compose_delta = compose->add_option("--delta", compose_args.delta);
  compose
      ->add_option("--ledger", compose_args.ledger,
                   "ledger file: '<tag> <eps> <delta>' lines")
      ->excludes(compose_k, compose_sigma, compose_s2, compose_delta);
  compose->add_option("--out", compose_args.out);

  DemoArgs demo_args;
  CLI::App* demo = app.add_subcommand("demo-invert", "embedding inversion recall experiment");
  demo->add_option("--vocab", demo_args.vocab)->required();
  demo->add_option("--dim", demo_args.dim)->required();
  demo->add_option("--len", demo_args.len)->required();
  demo->add_option("--epsilons", demo_args.epsilons, "descending list; 'inf' for no noise")
      ->required()
      ->delimiter(',');
  demo->add_option("--seeds", demo_args.seeds, "number of independent seeds")->required();
  demo->add_option("--delta", demo_args.delta);
  demo->add_option("--clip-c", demo_args.clip_c);
  demo->add_option("--seed", demo_args.seed);
  demo->add_option("--out", demo_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(calibrate)) return run_calibrate(calibrate_args);
    if (app.got_subcommand(sample)) return run_sample(sample_args);
    if (app.got_subcommand(verify)) return run_verify(verify_args);
    if (app.got_subcommand(compose)) return run_compose(compose_args);
    if (app.got_subcommand(demo)) return run_demo_invert(demo_args);
  } catch (const mgdp::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const mgdp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
