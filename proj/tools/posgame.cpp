#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "posgame/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace posgame;

  CLI::App app{"Closed-form position-building equilibria, costs and centralization analysis"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool renormalize = false;

  for (const char* name : {"equilibrium", "costs", "centralize", "poa", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON scenario file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "random seed (overrides output.seed)");
    sub->add_flag("--renormalize-lambdas", renormalize, "rescale lambdas to sum to one");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::exit_ok : cli::exit_config;
  }

  const auto* sub = app.get_subcommands().front();
  cli::Overrides overrides;
  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (sub->count("--seed")) overrides.seed = seed;
  overrides.renormalize_lambdas = renormalize;

  try {
    const auto cfg = cli::load_config(config_path, overrides);
    const auto result = cli::run_command(sub->get_name(), cfg);
    cli::write_outputs(cfg.output.directory, result.files);
    std::cout << result.report;
    return result.exit_code;
  } catch (const error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == errc::config ? cli::exit_config : cli::exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_numeric;
  }
}
