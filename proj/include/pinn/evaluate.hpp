#ifndef PINN_EVALUATE_HPP_
#define PINN_EVALUATE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinn/mlp.hpp"
#include "pinn/problems.hpp"
#include "pinn/training.hpp"

namespace pinn {

struct NormPair {
  double linf = 0.0;
  double l2 = 0.0;
};

// Discrete L2 flavour. kRms = sqrt(mean e^2) is the default; kAbsolute is
// sqrt(sum e^2); kRelative is sqrt(sum e^2) / sqrt(sum exact^2).
enum class L2Norm { kRms, kAbsolute, kRelative };

std::string_view l2_norm_name(L2Norm n);
L2Norm l2_norm_from_name(std::string_view name);

NormPair norms_from_errors(std::span<const double> errors, L2Norm norm = L2Norm::kRms,
                           std::span<const double> exact = {});

// Uniform grid at time t: grid_n points per spatial axis, endpoints included.
// One point per entry, coordinates (x, t) or (x, y, t).
std::vector<std::vector<double>> evaluation_grid(const ProblemSpec& problem, double t, int grid_n);

// Per-variable (Linf, L2) of prediction minus exact solution on the grid at t.
std::vector<NormPair> error_norms(const Mlp& net, const ProblemSpec& problem, double t, int grid_n,
                                  L2Norm norm = L2Norm::kRms);

struct ErrorReport {
  std::string problem;
  std::vector<std::string> variables;
  std::vector<double> times;
  std::vector<std::vector<NormPair>> rows;  // rows[time][variable]
  int grid_n = 0;
  L2Norm norm = L2Norm::kRms;
  nlohmann::json config = nlohmann::json::object();
};

ErrorReport report(const Mlp& net, const ProblemSpec& problem, std::span<const double> times,
                   int grid_n, L2Norm norm = L2Norm::kRms);

// Header "t,u_Linf,u_L2[,v_Linf,v_L2]"; errors printed as %.4e.
std::string report_csv(const ErrorReport& r);
ErrorReport parse_report_csv(const std::string& text);
// Full-precision JSON including the config snapshot.
nlohmann::json report_json(const ErrorReport& r);

// Max |residual| of the closed-form solution, differentiated exactly via jets,
// over n_points Latin hypercube interior points.
double exactness_oracle(const ProblemSpec& problem, int n_points, std::uint64_t seed);

struct SweepCell {
  int layers = 0;
  int width = 0;
  bool ok = false;
  std::string error;
  NormPair objective;  // worst variable: max Linf, max L2
  double final_loss = 0.0;
};

struct SweepResult {
  std::string problem;
  double validation_time = 1.0;
  int grid_n = 0;
  std::vector<SweepCell> cells;
  std::vector<TrainConfig> configs;  // one per cell
  std::optional<std::size_t> best;
};

// t = 1 when the horizon reaches it, mid-horizon otherwise.
double validation_time_for(const ProblemSpec& problem);

// Trains every (L, H) pair with base's remaining settings. Selects argmin Linf,
// tie-broken by L2; failing cells are recorded and skipped.
SweepResult sweep(const ProblemSpec& problem, std::span<const int> layer_set,
                  std::span<const int> width_set, const TrainConfig& base, int grid_n);
SweepResult run_sweep_cells(const ProblemSpec& problem, std::span<const TrainConfig> configs,
                            int grid_n);
std::optional<std::size_t> select_best(std::span<const SweepCell> cells);
std::string sweep_csv(const SweepResult& r);

int default_grid_n(const ProblemSpec& problem);

}  // namespace pinn

#endif  // PINN_EVALUATE_HPP_
