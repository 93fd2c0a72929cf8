#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsc/cli.hpp"

namespace {

using qsc::cli::Json;

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw qsc::DomainError("Config", "cannot read config file '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw qsc::DomainError("Config", "/: " + std::string(e.what()));
  }
}

Json parse_json_text(const std::string& text, const std::string& flag) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw qsc::DomainError("Config", flag + ": " + std::string(e.what()));
  }
}

int run_command(const std::string& config_path,
                std::optional<std::uint64_t> seed, int threads,
                const std::string& out_path) {
  const qsc::cli::Config config =
      qsc::cli::parse_config(read_json_file(config_path));
  const qsc::cli::RunOutcome outcome =
      qsc::cli::run_config(config, seed, threads);
  const std::string path = out_path.empty() ? config.output : out_path;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw qsc::DomainError("Config", "/output: cannot write '" + path + "'");
  }
  out << outcome.report.dump(2) << "\n";
  std::cout << outcome.summary << "report written to " << path << "\n";
  return outcome.exit_code;
}

int kernel_eval_command(const std::string& config_path, const std::string& f,
                        const std::string& g, double t, const std::string& a,
                        const std::vector<double>& cuts) {
  const qsc::cli::Config config =
      qsc::cli::parse_config(read_json_file(config_path));
  if (!config.noise) {
    throw qsc::DomainError("Config", "/noise: required for kernel evaluation");
  }
  const int d = static_cast<int>((*config.noise)[0].size());
  const qsc::StepFunction fs =
      qsc::cli::parse_stepfun(parse_json_text(f, "--f"), d, "--f");
  const qsc::StepFunction gs =
      qsc::cli::parse_stepfun(parse_json_text(g, "--g"), d, "--g");
  const qsc::CMatrix am =
      qsc::cli::parse_cmatrix(parse_json_text(a, "--a"), "--a");
  const qsc::cli::KernelEvalResult res =
      qsc::cli::kernel_eval(config, fs, gs, t, am, cuts);
  std::cout << qsc::cli::kernel_eval_to_json(res).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional laboratory for quantum stochastic "
               "cocycles: associated semigroup families, their kernels, and "
               "property verifiers"};
  app.require_subcommand(1);

  std::string config_path;
  long long seed = -1;
  int threads = 1;
  std::string out_path;
  CLI::App* run = app.add_subcommand("run", "run the configured suites");
  run->add_option("--config", config_path, "path to a JSON config")
      ->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the sample seed")
          ->check(CLI::NonNegativeNumber);
  run->add_option("--threads", threads, "verifier-internal parallelism")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "report path, overrides the config");

  std::string demo_name;
  CLI::App* demo = app.add_subcommand("demo", "run a bundled demonstration");
  demo->add_option("name", demo_name,
                   "one of trivial, product-dephasing, counterexample, weyl, "
                   "violator")
      ->required();

  std::string ke_config;
  std::string ke_f;
  std::string ke_g;
  double ke_t = 0.0;
  std::string ke_a;
  std::vector<double> ke_cuts;
  CLI::App* keval = app.add_subcommand(
      "kernel-eval", "evaluate the kernel on a pair of step functions");
  keval->add_option("--config", ke_config, "path to a JSON config")->required();
  keval->add_option("--f", ke_f, "left step function as JSON")->required();
  keval->add_option("--g", ke_g, "right step function as JSON")->required();
  keval->add_option("--t", ke_t, "time horizon")->required();
  keval->add_option("--a", ke_a, "argument matrix as JSON")->required();
  keval->add_option("--cuts", ke_cuts, "extra partition cut times")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      std::optional<std::uint64_t> seed_override;
      if (seed_opt->count() > 0) {
        seed_override = static_cast<std::uint64_t>(seed);
      }
      return run_command(config_path, seed_override, threads, out_path);
    }
    if (demo->parsed()) {
      return qsc::cli::run_demo(demo_name, std::cout);
    }
    if (keval->parsed()) {
      return kernel_eval_command(ke_config, ke_f, ke_g, ke_t, ke_a, ke_cuts);
    }
  } catch (const qsc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
