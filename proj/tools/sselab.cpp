#include <iostream>

#include <CLI11.hpp>

#include "sselab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fidelity laws and Monte-Carlo checks for qubits under stochastic Schroedinger noise"};
  app.require_subcommand(1);

  std::string target;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  bool check = false;
  std::string out;

  auto* run = app.add_subcommand("run", "Run a scenario from a config file (INI or run.json) or a preset name");
  run->add_option("target", target, "Config path or preset name")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed override");
  auto* paths_opt = run->add_option("--paths", paths, "Number of Monte-Carlo paths")->check(CLI::PositiveNumber);
  run->add_flag("--check", check, "Exit with status 2 when an acceptance check fails");
  run->add_option("--out", out, "Output directory (default out/<name>)");

  app.add_subcommand("presets", "List the built-in scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sselab::cli::kExitConfig;
  }

  if (app.got_subcommand("presets")) {
    sselab::cli::list_presets(std::cout);
    return 0;
  }

  sselab::cli::RunOptions options;
  if (*seed_opt) options.seed = seed;
  if (*paths_opt) options.paths = paths;
  options.check = check;
  options.out = out;
  return sselab::cli::run_command(target, options, std::cerr);
}
