#ifndef PINN_TRAINING_HPP_
#define PINN_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinn/mlp.hpp"
#include "pinn/problems.hpp"
#include "pinn/sampling.hpp"

namespace pinn {

struct LossBreakdown {
  double pde = 0.0;
  double ic = 0.0;
  double bc = 0.0;
  double lambda_ic = 10.0;
  double lambda_bc = 10.0;
  double total = 0.0;

  bool finite() const;
};

// total = pde + lambda_ic * ic + lambda_bc * bc, evaluated in that order.
LossBreakdown make_breakdown(double pde, double ic, double bc, double lambda_ic, double lambda_bc);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double learning_rate = 1e-3;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t n, AdamOptions o = {}) : m(n, 0.0), v(n, 0.0), options(o) {}

  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  AdamOptions options;
};

// One bias-corrected Adam update of theta in place.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad);

struct TrainConfig {
  int layers = 4;
  int width = 40;
  int epochs = 20000;
  SampleCounts counts;
  std::uint64_t seed = 42;
  bool resample = false;
  double lambda_ic = 10.0;
  double lambda_bc = 10.0;
  double learning_rate = 1e-3;
  int workers = 1;
  int log_every = 1;
  double max_seconds = 0.0;  // 0 disables the wallclock guard

  // Defaults for a problem: E = 20000 in 1D, 40000 in 2D; N_b per sampling defaults.
  static TrainConfig defaults_for(const ProblemSpec& problem);
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

std::vector<int> layer_dims_for(const ProblemSpec& problem, int layers, int width);
// Network initialized for a problem: inputs normalized from the space-time box to [-1,1].
Mlp make_network(const ProblemSpec& problem, int layers, int width, std::uint64_t seed);

// Points per work block. Blocks are summed sequentially inside and combined by
// a pairwise tree across blocks, so results do not depend on the worker count.
inline constexpr int kBlockSize = 256;

// Reference evaluation through Mlp::forward_jet, one point at a time.
LossBreakdown compute_loss(const Mlp& net, const ProblemSpec& problem, const SampleSet& samples,
                           double lambda_ic, double lambda_bc);

struct LossAndGradient {
  LossBreakdown loss;
  std::vector<double> gradient;
};

// Batched loss and its exact parameter gradient.
LossAndGradient loss_and_gradient(const Mlp& net, const ProblemSpec& problem,
                                  const SampleSet& samples, double lambda_ic, double lambda_bc,
                                  int workers = 1);

// Same quantity through a GradTape. Slow; for verification on small sets.
LossAndGradient taped_loss_and_gradient(const Mlp& net, const ProblemSpec& problem,
                                        const SampleSet& samples, double lambda_ic,
                                        double lambda_bc);

class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(int epoch, const LossBreakdown& loss);
  int epoch() const { return epoch_; }
  const LossBreakdown& loss() const { return loss_; }

 private:
  int epoch_;
  LossBreakdown loss_;
};

struct LossRecord {
  int epoch = 0;
  LossBreakdown loss;
};

struct TrainResult {
  Mlp net;
  std::vector<LossRecord> history;
  int epochs_run = 0;
  bool hit_time_limit = false;
  double seconds = 0.0;
};

using TrainObserver = std::function<void(int epoch, const LossBreakdown&)>;

// Full-batch Adam on the composite loss. Deterministic in (problem, config).
TrainResult train(const ProblemSpec& problem, const TrainConfig& config,
                  const TrainObserver& observer = {});

// CSV with header "epoch,pde,ic,bc,total", round-trip precision.
std::string loss_history_csv(std::span<const LossRecord> history);
std::vector<LossRecord> parse_loss_history_csv(const std::string& text, double lambda_ic,
                                               double lambda_bc);

// Number of increases of the trailing moving average of total loss.
int moving_average_increases(std::span<const LossRecord> history, int window);

}  // namespace pinn

#endif  // PINN_TRAINING_HPP_
