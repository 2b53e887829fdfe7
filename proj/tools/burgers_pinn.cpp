#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinn/commands.hpp"
#include "pinn/config.hpp"
#include "pinn/io.hpp"

namespace {

// Flag name -> config key. Every flag takes the same text as the config file.
const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"--problem", "problem"},
    {"--layers", "layers"},
    {"--width", "width"},
    {"--epochs", "epochs"},
    {"--n-interior", "n_interior"},
    {"--n-initial", "n_initial"},
    {"--n-boundary", "n_boundary"},
    {"--seed", "seed"},
    {"--resample", "resample"},
    {"--lambda-ic", "lambda_ic"},
    {"--lambda-bc", "lambda_bc"},
    {"--learning-rate", "learning_rate"},
    {"--workers", "workers"},
    {"--log-every", "log_every"},
    {"--max-seconds", "max_seconds"},
    {"--R", "R"},
    {"--epsilon", "epsilon"},
    {"--times", "times"},
    {"--grid-n", "grid_n"},
    {"--spacetime-n", "spacetime_n"},
    {"--l2-norm", "l2_norm"},
    {"--output-dir", "output_dir"},
    {"--formats", "formats"},
    {"--checkpoint", "checkpoint"},
    {"--sweep-layers", "sweep_layers"},
    {"--sweep-widths", "sweep_widths"},
};

struct ConfigArgs {
  std::string file;
  std::map<std::string, std::string> values;  // config key -> flag text
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.file, "key = value config file; flags override it");
  for (const auto& [flag, key] : kConfigFlags) {
    cmd->add_option(flag, args.values[key], "config key '" + key + "'");
  }
}

pinn::KeyValues overrides_of(const CLI::App* cmd, const ConfigArgs& args) {
  pinn::KeyValues kv;
  for (const auto& [flag, key] : kConfigFlags) {
    if (cmd->count(flag) > 0) kv[key] = args.values.at(key);
  }
  return kv;
}

int with_config(const CLI::App* cmd, const ConfigArgs& args, int (*run)(const pinn::RunConfig&, std::ostream&)) {
  pinn::KeyValues file;
  try {
    if (!args.file.empty()) file = pinn::parse_key_values(pinn::read_file(args.file));
  } catch (const pinn::ConfigError& e) {
    std::cerr << "error: " << args.file << ": " << e.what() << '\n';
    return pinn::kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pinn::kExitInvalidConfig;
  }
  pinn::RunConfig config;
  try {
    config = pinn::build_run_config(file, overrides_of(cmd, args));
  } catch (const pinn::UnknownProblemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pinn::kExitUnknownProblem;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pinn::kExitInvalidConfig;
  }
  return run(config, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed neural network solver for Burgers-type benchmarks"};
  app.require_subcommand(1);

  ConfigArgs solve_args, sweep_args, export_args;
  auto* solve = app.add_subcommand("solve", "train, evaluate and write all artifacts");
  add_config_flags(solve, solve_args);
  auto* sweep = app.add_subcommand("sweep", "train every (layers, width) pair and select the best");
  add_config_flags(sweep, sweep_args);
  auto* exp = app.add_subcommand("export", "write plot data from a checkpoint");
  add_config_flags(exp, export_args);

  std::vector<std::string> check_ids;
  auto* check = app.add_subcommand("check", "exactness oracles and gradient checks");
  check->add_option("problems", check_ids, "problem ids (default: ex1..ex5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pinn::kExitInvalidConfig;
  }

  if (solve->parsed()) return with_config(solve, solve_args, pinn::cmd_solve);
  if (sweep->parsed()) return with_config(sweep, sweep_args, pinn::cmd_sweep);
  if (exp->parsed()) return with_config(exp, export_args, pinn::cmd_export);
  if (check->parsed()) return pinn::cmd_check(check_ids, std::cout);
  return pinn::kExitFailure;
}
