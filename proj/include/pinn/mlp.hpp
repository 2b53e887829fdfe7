#ifndef PINN_MLP_HPP_
#define PINN_MLP_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pinn/jet.hpp"
#include "pinn/tape.hpp"

namespace pinn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-input affine map applied before the first layer: x_hat = scale * x + shift.
// Derivative channels of the network output stay in physical units because
// input jets are seeded with d = scale instead of 1.
struct InputMap {
  std::vector<double> scale;
  std::vector<double> shift;

  static InputMap identity(int n_in);
  // Maps [lo_i, hi_i] onto [-1, 1] per input.
  static InputMap to_unit_box(std::span<const double> lo, std::span<const double> hi);

  double apply(int i, double x) const { return scale[i] * x + shift[i]; }
  bool operator==(const InputMap&) const = default;
};

struct DenseLayer {
  RowMatrix weight;  // fan_out x fan_in
  Eigen::VectorXd bias;
};

// Fully connected network: tanh on hidden layers, identity on the output layer.
// Flat parameter order is, layer by layer, the row-major weight matrix followed
// by the bias vector.
class Mlp {
 public:
  Mlp() = default;

  // Glorot-uniform weights, zero biases, deterministic in seed.
  static Mlp init(std::vector<int> layer_dims, std::uint64_t seed,
                  InputMap input_map = {});

  const std::vector<int>& layer_dims() const { return dims_; }
  int n_in() const { return dims_.front(); }
  int n_out() const { return dims_.back(); }
  int hidden_layers() const { return static_cast<int>(dims_.size()) - 2; }
  std::uint64_t seed() const { return seed_; }
  const InputMap& input_map() const { return input_map_; }
  void set_input_map(InputMap map);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  std::size_t param_count() const;
  std::vector<double> get_params() const;
  void set_params(std::span<const double> theta);

  // L in {3..7}, H in {20,30,...,60}, n_in in {2,3}, n_out in {1,2}, uniform width.
  bool in_sweep_family() const;

  std::vector<double> forward(std::span<const double> point) const;
  std::vector<Jet2> forward_jet(std::span<const double> point) const;

 private:
  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
  InputMap input_map_;
  std::uint64_t seed_ = 0;
};

std::size_t param_count_for(std::span<const int> layer_dims);

// Taped evaluation for the reference reverse-over-forward route.
std::vector<Var> register_parameters(GradTape& tape, const Mlp& net);
std::vector<Var> forward_jet(const Mlp& net, GradTape& tape, std::span<const Var> params,
                             std::span<const double> point);

// Binary checkpoint; layout documented in docs/formats.md.
void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_checkpoint(const Mlp& net);
Mlp deserialize_checkpoint(std::span<const std::uint8_t> bytes);

}  // namespace pinn

#endif  // PINN_MLP_HPP_
