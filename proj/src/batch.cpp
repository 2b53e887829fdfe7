#include "pinn/batch.hpp"

#include <stdexcept>

namespace pinn {

ChannelPlan ChannelPlan::full(int n_in) {
  std::vector<int> all;
  for (int i = 0; i < n_in; ++i) all.push_back(i);
  return jets(n_in, std::move(all));
}

void tanh_inplace(Eigen::Ref<Eigen::MatrixXd> m) {
  auto a = m.array();
  a = 1.0 - 2.0 / ((2.0 * a).exp() + 1.0);
}

void batch_forward(const Mlp& net, const Eigen::Ref<const Eigen::MatrixXd>& points,
                   const ChannelPlan& plan, BatchTrace& trace) {
  const int n_in = net.n_in();
  if (points.rows() != n_in || plan.n_in != n_in) {
    throw std::invalid_argument("batch_forward: input dimension mismatch");
  }
  const int B = static_cast<int>(points.cols());
  const int C = plan.count();
  const auto& layers = net.layers();
  const std::size_t L = layers.size() - 1;  // hidden layers
  const auto& map = net.input_map();

  trace.n_points = B;
  trace.plan = plan;
  trace.pre.resize(L);
  trace.post.resize(L + 1);

  auto& in = trace.post[0];
  in.setZero(n_in, static_cast<Eigen::Index>(C) * B);
  for (int i = 0; i < n_in; ++i) {
    in.row(i).head(B) = (points.row(i).array() * map.scale[i] + map.shift[i]).matrix();
    if (plan.derivatives) in.row(i).segment(static_cast<Eigen::Index>(plan.first(i)) * B, B).setConstant(map.scale[i]);
  }

  for (std::size_t l = 0; l < L; ++l) {
    auto& pre = trace.pre[l];
    pre.noalias() = layers[l].weight * trace.post[l];
    pre.leftCols(B).colwise() += layers[l].bias;

    auto& post = trace.post[l + 1];
    post.resize(pre.rows(), pre.cols());
    post.leftCols(B) = pre.leftCols(B);
    tanh_inplace(post.leftCols(B));
    if (!plan.derivatives) continue;

    const auto h = post.leftCols(B).array();
    const Eigen::ArrayXXd h1 = 1.0 - h.square();
    for (int i = 0; i < n_in; ++i) {
      const auto c = static_cast<Eigen::Index>(plan.first(i)) * B;
      post.middleCols(c, B).array() = h1 * pre.middleCols(c, B).array();
    }
    if (plan.second.empty()) continue;
    const Eigen::ArrayXXd h2 = -2.0 * h * h1;
    for (std::size_t j = 0; j < plan.second.size(); ++j) {
      const auto ci = static_cast<Eigen::Index>(plan.first(plan.second[j])) * B;
      const auto cj = static_cast<Eigen::Index>(plan.second_slot(static_cast<int>(j))) * B;
      post.middleCols(cj, B).array() = h2 * pre.middleCols(ci, B).array().square() +
                                       h1 * pre.middleCols(cj, B).array();
    }
  }

  trace.output.noalias() = layers[L].weight * trace.post[L];
  trace.output.leftCols(B).colwise() += layers[L].bias;
}

void batch_backward(const Mlp& net, BatchTrace& trace,
                    const Eigen::Ref<const Eigen::MatrixXd>& output_adjoint,
                    std::span<double> grad) {
  const auto& layers = net.layers();
  if (grad.size() != net.param_count()) {
    throw std::invalid_argument("batch_backward: gradient buffer has wrong length");
  }
  if (output_adjoint.rows() != trace.output.rows() || output_adjoint.cols() != trace.output.cols()) {
    throw std::invalid_argument("batch_backward: adjoint shape does not match trace");
  }
  const int B = trace.n_points;
  const ChannelPlan& plan = trace.plan;
  const std::size_t L = layers.size() - 1;

  std::vector<std::size_t> offset(layers.size() + 1, 0);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offset[l + 1] = offset[l] + layers[l].weight.size() + layers[l].bias.size();
  }

  auto accumulate = [&](std::size_t l, const Eigen::MatrixXd& adj_pre) {
    const auto& W = layers[l].weight;
    // Computed in aligned scratch, then added into grad.
    trace.gw.noalias() = adj_pre * trace.post[l].transpose();
    trace.gb = adj_pre.leftCols(B).rowwise().sum();
    Eigen::Map<RowMatrix> gw(grad.data() + offset[l], W.rows(), W.cols());
    gw += trace.gw;
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offset[l] + W.size(), W.rows());
    gb += trace.gb;
  };

  trace.adj_pre = output_adjoint;
  accumulate(L, trace.adj_pre);

  for (std::size_t l = L; l-- > 0;) {
    // Adjoint of hidden activations post[l+1].
    trace.adj_post.noalias() = layers[l + 1].weight.transpose() * trace.adj_pre;

    const auto& pre = trace.pre[l];
    const auto h = trace.post[l + 1].leftCols(B).array();
    trace.h1 = 1.0 - h.square();
    auto& ap = trace.adj_pre;
    const auto& ah = trace.adj_post;
    ap.resize(ah.rows(), ah.cols());
    ap.leftCols(B).array() = ah.leftCols(B).array() * trace.h1;

    if (plan.derivatives) {
      trace.h2 = -2.0 * h * trace.h1;
      for (int i = 0; i < plan.n_in; ++i) {
        const auto c = static_cast<Eigen::Index>(plan.first(i)) * B;
        ap.middleCols(c, B).array() = ah.middleCols(c, B).array() * trace.h1;
        ap.leftCols(B).array() += ah.middleCols(c, B).array() * trace.h2 * pre.middleCols(c, B).array();
      }
      if (!plan.second.empty()) {
        trace.h3 = -2.0 * trace.h1.square() - 2.0 * h * trace.h2;
        for (std::size_t j = 0; j < plan.second.size(); ++j) {
          const auto ci = static_cast<Eigen::Index>(plan.first(plan.second[j])) * B;
          const auto cj = static_cast<Eigen::Index>(plan.second_slot(static_cast<int>(j))) * B;
          const auto g = ah.middleCols(cj, B).array();
          const auto pi = pre.middleCols(ci, B).array();
          ap.middleCols(cj, B).array() = g * trace.h1;
          ap.middleCols(ci, B).array() += 2.0 * g * trace.h2 * pi;
          ap.leftCols(B).array() +=
              g * (trace.h3 * pi.square() + trace.h2 * pre.middleCols(cj, B).array());
        }
      }
    }
    accumulate(l, ap);
  }
}

}  // namespace pinn
