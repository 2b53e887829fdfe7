#ifndef PINN_BATCH_HPP_
#define PINN_BATCH_HPP_

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pinn/mlp.hpp"

namespace pinn {

// Which jet channels a batched evaluation carries. Channel 0 is the value,
// channels 1..n_in the first derivatives, and the remaining channels the
// second derivatives along the listed input dimensions. Unlisted second
// derivatives are never formed: diagonal channels only feed themselves.
struct ChannelPlan {
  int n_in = 0;
  bool derivatives = false;
  std::vector<int> second;

  static ChannelPlan value_only(int n_in) { return {n_in, false, {}}; }
  static ChannelPlan jets(int n_in, std::vector<int> second) {
    return {n_in, true, std::move(second)};
  }
  static ChannelPlan full(int n_in);

  int count() const { return derivatives ? 1 + n_in + static_cast<int>(second.size()) : 1; }
  int first(int i) const { return 1 + i; }
  int second_slot(int j) const { return 1 + n_in + j; }
};

// Activations of one batched jet forward pass. Every matrix stores its
// channels as consecutive column blocks of n_points columns.
struct BatchTrace {
  int n_points = 0;
  ChannelPlan plan;
  std::vector<Eigen::MatrixXd> pre;   // pre-activation of hidden layer l
  std::vector<Eigen::MatrixXd> post;  // post[0] = input channels, post[l+1] = tanh(pre[l])
  Eigen::MatrixXd output;             // n_out x (channels * n_points)

  // Scratch reused by batch_backward.
  Eigen::MatrixXd adj_post, adj_pre;
  Eigen::ArrayXXd h1, h2, h3;
  RowMatrix gw;
  Eigen::VectorXd gb;

  // Output channel c of output k at point p.
  double out(int k, int c, int p) const { return output(k, c * n_points + p); }
};

// Batched forward pass over the columns of points (n_in x B).
void batch_forward(const Mlp& net, const Eigen::Ref<const Eigen::MatrixXd>& points,
                   const ChannelPlan& plan, BatchTrace& trace);

// Reverse sweep through a recorded forward pass. output_adjoint has the shape
// of trace.output; the parameter gradient is added into grad (flat order).
void batch_backward(const Mlp& net, BatchTrace& trace,
                    const Eigen::Ref<const Eigen::MatrixXd>& output_adjoint,
                    std::span<double> grad);

// Vectorized tanh, 1 - 2 / (exp(2x) + 1).
void tanh_inplace(Eigen::Ref<Eigen::MatrixXd> m);

}  // namespace pinn

#endif  // PINN_BATCH_HPP_
