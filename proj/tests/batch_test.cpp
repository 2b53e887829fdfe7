#include "pinn/batch.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "pinn/random.hpp"
#include "pinn/tape.hpp"

namespace pinn {
namespace {

Eigen::MatrixXd random_points(int n_in, int B, std::uint64_t seed) {
  auto eng = make_engine(seed, Stream::kTest);
  Eigen::MatrixXd p(n_in, B);
  for (int k = 0; k < B; ++k) {
    for (int i = 0; i < n_in; ++i) p(i, k) = 4.0 * uniform01(eng) - 2.0;
  }
  return p;
}

TEST(Batch, TanhMatchesStd) {
  Eigen::MatrixXd m(3, 7);
  m << -30, -5, -1, -1e-9, 0, 1e-9, 0.5, 1, 2, 3, 5, 10, 19, 25, -0.3, -2, -0.7, 0.2, 7, -12, 0.01;
  Eigen::MatrixXd t = m;
  tanh_inplace(t);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    EXPECT_NEAR(t(i), std::tanh(m(i)), 4e-16) << m(i);
  }
}

TEST(Batch, ForwardMatchesPointwiseJets) {
  for (int n_in : {2, 3}) {
    const Mlp net = Mlp::init({n_in, 20, 20, 20, 2}, 3, InputMap::to_unit_box(
        std::vector<double>(n_in, -2.0), std::vector<double>(n_in, 2.0)));
    const Eigen::MatrixXd pts = random_points(n_in, 50, 3);
    BatchTrace trace;
    batch_forward(net, pts, ChannelPlan::full(n_in), trace);
    const ChannelPlan plan = ChannelPlan::full(n_in);
    for (int p = 0; p < 50; ++p) {
      const std::vector<double> x(pts.col(p).data(), pts.col(p).data() + n_in);
      const auto jets = net.forward_jet(x);
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(trace.out(k, 0, p), jets[k].value(), 1e-14);
        for (int i = 0; i < n_in; ++i) {
          EXPECT_NEAR(trace.out(k, plan.first(i), p), jets[k].d(i), 1e-13);
          EXPECT_NEAR(trace.out(k, plan.second_slot(i), p), jets[k].dd(i), 1e-12);
        }
      }
    }
  }
}

// Weighted sum of every carried output channel; its gradient exercises every
// adjoint path of batch_backward.
TEST(Batch, BackwardMatchesTape) {
  const int n_in = 3;
  const Mlp net = Mlp::init({n_in, 12, 12, 2}, 4);
  const Eigen::MatrixXd pts = random_points(n_in, 6, 4);
  const ChannelPlan plan = ChannelPlan::jets(n_in, {0, 1});
  BatchTrace trace;
  batch_forward(net, pts, plan, trace);
  auto eng = make_engine(4, Stream::kTest, {1});
  Eigen::MatrixXd adj(trace.output.rows(), trace.output.cols());
  for (Eigen::Index i = 0; i < adj.size(); ++i) adj(i) = uniform01(eng) - 0.5;
  std::vector<double> grad(net.param_count(), 0.0);
  batch_backward(net, trace, adj, grad);

  GradTape tape(n_in);
  const auto params = register_parameters(tape, net);
  Var loss = tape.constant(0.0);
  const int B = static_cast<int>(pts.cols());
  for (int p = 0; p < B; ++p) {
    const std::vector<double> x(pts.col(p).data(), pts.col(p).data() + n_in);
    const auto out = forward_jet(net, tape, params, x);
    for (int k = 0; k < 2; ++k) {
      loss = loss + adj(k, p) * tape.value_of(out[k]);
      for (int i = 0; i < n_in; ++i) loss = loss + adj(k, plan.first(i) * B + p) * tape.d_of(out[k], i);
      for (int j = 0; j < 2; ++j) {
        loss = loss + adj(k, plan.second_slot(j) * B + p) * tape.dd_of(out[k], plan.second[j]);
      }
    }
  }
  tape.finalize(loss);
  const auto ref = tape.param_gradient();
  for (std::size_t i = 0; i < grad.size(); ++i) EXPECT_NEAR(grad[i], ref[i], 1e-12) << i;
}

TEST(Batch, BackwardAccumulates) {
  const Mlp net = Mlp::init({2, 8, 1}, 5);
  BatchTrace trace;
  batch_forward(net, random_points(2, 4, 5), ChannelPlan::value_only(2), trace);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Ones(1, 4);
  std::vector<double> once(net.param_count(), 0.0), twice(net.param_count(), 0.0);
  batch_backward(net, trace, adj, once);
  batch_backward(net, trace, adj, twice);
  batch_backward(net, trace, adj, twice);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(twice[i], 2.0 * once[i], 1e-15);
}

TEST(Batch, ShapeErrors) {
  const Mlp net = Mlp::init({2, 8, 1}, 5);
  BatchTrace trace;
  EXPECT_THROW(batch_forward(net, random_points(3, 4, 5), ChannelPlan::value_only(3), trace),
               std::invalid_argument);
  batch_forward(net, random_points(2, 4, 5), ChannelPlan::value_only(2), trace);
  std::vector<double> grad(net.param_count() - 1, 0.0);
  EXPECT_THROW(batch_backward(net, trace, Eigen::MatrixXd::Ones(1, 4), grad), std::invalid_argument);
}

}  // namespace
}  // namespace pinn
