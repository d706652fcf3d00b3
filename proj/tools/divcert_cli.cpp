#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "divcert/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Divergence certificates for unbounded smooth convex problems"};
  app.require_subcommand(1);

  std::string run_config;
  std::string run_out;
  bool run_assert = false;
  auto* run = app.add_subcommand("run", "Run one experiment config; writes a CSV trace and a summary JSON");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_out, "Output directory (default: current directory)");
  run->add_flag("--assert-bounds", run_assert, "Exit 2 when any bound assertion fails");

  std::string cert_problem;
  std::size_t budget = 10000;
  auto* certify = app.add_subcommand("certify", "Decide unboundedness of a problem with the accelerated method");
  certify->add_option("problem", cert_problem, "Problem file (JSON)")->required();
  certify->add_option("--budget", budget, "Iteration budget")->check(CLI::PositiveNumber);

  std::string sweep_dir;
  std::string sweep_out;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run every *.json config in a directory, asserting bounds");
  sweep->add_option("dir", sweep_dir, "Config directory")->required();
  sweep->add_option("--out", sweep_out, "Write per-config outputs and sweep_report.json here");
  sweep->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto opt_path = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
  };
  if (*run) return divcert::cli_run(run_config, opt_path(run_out), run_assert, std::cout, std::cerr);
  if (*certify) return divcert::cli_certify(cert_problem, budget, std::cout, std::cerr);
  return divcert::cli_sweep(sweep_dir, opt_path(sweep_out), std::cout, std::cerr, threads);
}
