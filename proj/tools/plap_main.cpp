#include "plap/error.hpp"
#include "plap/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kSolverFailure = 3, kMismatch = 4 };

plap::RunConfig load(const std::string& path, const std::optional<int>& threads) {
  plap::RunConfig cfg = plap::parse_config_file(path);
  if (threads) {
    cfg.threads = *threads;
    cfg.validate();
  }
  return cfg;
}

int run(const std::string& path, const std::optional<std::string>& out_dir, const std::optional<int>& threads) {
  plap::RunConfig cfg = load(path, threads);
  if (out_dir) cfg.output_dir = *out_dir;
  const plap::ExperimentOutput out = plap::run_and_write(cfg, cfg.output_dir);
  const auto& last = out.history.back();
  std::cout << plap::to_string(cfg.mode) << ": " << out.history.size() << " rows, " << out.mesh->n_vertices()
            << " vertices, final gap " << last.gap << (out.converged ? "" : " (not converged)") << '\n'
            << "wrote " << cfg.output_dir << '\n';
  return kOk;
}

int verify(const std::string& path, const std::optional<int>& threads) {
  const plap::RunConfig cfg = load(path, threads);
  const plap::ExperimentOutput out = plap::run_experiment(cfg);
  bool all = true;
  for (const plap::CheckResult& c : plap::verify_experiment(cfg, out)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ')';
    std::cout << '\n';
    all = all && c.passed;
  }
  return all ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive relaxed Kacanov solver for the p-Laplacian"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::string> out_dir;
  std::optional<int> run_threads;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment and write its output files");
  run_cmd->add_option("config", run_config, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run_cmd->add_option("--threads", run_threads, "Worker threads for element loops")->check(CLI::PositiveNumber);

  std::string verify_config;
  std::optional<int> verify_threads;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run an experiment and check its invariants");
  verify_cmd->add_option("config", verify_config, "Config file")->required();
  verify_cmd->add_option("--threads", verify_threads, "Worker threads for element loops")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run(run_config, out_dir, run_threads);
    return verify(verify_config, verify_threads);
  } catch (const plap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const plap::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kSolverFailure;
  }
}
