#ifndef PINN_COMMANDS_HPP_
#define PINN_COMMANDS_HPP_

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pinn/config.hpp"
#include "pinn/mlp.hpp"
#include "pinn/problems.hpp"

namespace pinn {

// Process exit codes, stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,         // unexpected internal error
  kExitInvalidConfig = 2,   // bad flag, key or value
  kExitUnknownProblem = 3,  // problem id not in the registry
  kExitNonFinite = 4,       // training aborted on a non-finite loss
  kExitCheckFailed = 5,     // a hard threshold of `check` failed
  kExitIo = 6,              // missing/corrupt checkpoint, dims mismatch, write failure
  kExitSweepFailed = 7,     // every sweep cell failed
};

// Plot data keyed by file name: one file per time and a space-time file.
std::map<std::string, std::string> plot_data_files(const Mlp& net, const ProblemSpec& problem,
                                                   const std::vector<double>& times, int grid_n,
                                                   int spacetime_n);

int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_check(const std::vector<std::string>& problem_ids, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_export(const RunConfig& config, std::ostream& log);

struct CheckOutcome {
  std::string problem;
  double oracle_residual = 0.0;
  bool oracle_enforced = true;
  double gradient_rel_error = 0.0;
  bool passed = false;
};

// Exactness oracle (1000 points) and a finite-difference spot check of the
// training gradient (20 parameters) for one problem.
CheckOutcome run_check(const ProblemSpec& problem);

}  // namespace pinn

#endif  // PINN_COMMANDS_HPP_
