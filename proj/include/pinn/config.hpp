#ifndef PINN_CONFIG_HPP_
#define PINN_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinn/evaluate.hpp"
#include "pinn/problems.hpp"
#include "pinn/training.hpp"

namespace pinn {

// Everything a command needs. Text form is one "key = value" per line; '#'
// starts a comment; lists are comma separated. Keys are listed in
// docs/formats.md.
struct RunConfig {
  std::string problem = "ex1";
  TrainConfig train;
  std::optional<double> reynolds;
  std::optional<double> epsilon;
  std::vector<double> times;
  int grid_n = 1001;
  int spacetime_n = 101;
  L2Norm l2_norm = L2Norm::kRms;
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  std::string checkpoint;
  std::vector<int> sweep_layers{3, 4, 5, 6, 7};
  std::vector<int> sweep_widths{20, 30, 40, 50, 60};

  // Defaults for a problem id; PINN_OUTPUT_DIR, when set, replaces "out".
  static RunConfig defaults_for(const std::string& problem);

  ProblemSpec make_problem() const;
  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
// Starts from defaults_for(problem), where problem comes from the overrides,
// then the file, then "ex1"; file keys are applied first, overrides last.
RunConfig build_run_config(const KeyValues& file, const KeyValues& overrides);
RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& c);

// Result-affecting fields only: no paths and no worker count.
nlohmann::json config_snapshot(const RunConfig& c);

}  // namespace pinn

#endif  // PINN_CONFIG_HPP_
