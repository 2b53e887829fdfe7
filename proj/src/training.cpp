#include "pinn/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/AutoDiff>

#include "pinn/batch.hpp"
#include "pinn/io.hpp"

namespace pinn {

bool LossBreakdown::finite() const {
  return std::isfinite(pde) && std::isfinite(ic) && std::isfinite(bc) && std::isfinite(total);
}

LossBreakdown make_breakdown(double pde, double ic, double bc, double lambda_ic, double lambda_bc) {
  LossBreakdown b;
  b.pde = pde;
  b.ic = ic;
  b.bc = bc;
  b.lambda_ic = lambda_ic;
  b.lambda_bc = lambda_bc;
  b.total = pde + lambda_ic * ic + lambda_bc * bc;
  return b;
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != grad.size() || state.m.size() != theta.size() ||
      state.v.size() != theta.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and moment lengths differ");
  }
  const AdamOptions& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * g;
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

TrainConfig TrainConfig::defaults_for(const ProblemSpec& problem) {
  TrainConfig c;
  c.counts = SampleCounts::defaults_for(problem);
  c.epochs = problem.n_space == 1 ? 20000 : 40000;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (layers < 1 || width < 1) throw std::invalid_argument("layers and width must be positive");
  if (!(lambda_ic >= 0.0) || !(lambda_bc >= 0.0)) throw std::invalid_argument("loss weights must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (counts.interior < 1 || counts.initial < 1 || counts.boundary < 1) {
    throw std::invalid_argument("sample counts must be at least 1");
  }
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (log_every < 1) throw std::invalid_argument("log_every must be at least 1");
  if (!(max_seconds >= 0.0)) throw std::invalid_argument("max_seconds must be >= 0");
}

std::vector<int> layer_dims_for(const ProblemSpec& problem, int layers, int width) {
  std::vector<int> dims{problem.n_in()};
  for (int l = 0; l < layers; ++l) dims.push_back(width);
  dims.push_back(problem.n_out);
  return dims;
}

Mlp make_network(const ProblemSpec& problem, int layers, int width, std::uint64_t seed) {
  const auto lo = problem.lower_corner();
  const auto hi = problem.upper_corner();
  return Mlp::init(layer_dims_for(problem, layers, width), seed, InputMap::to_unit_box(lo, hi));
}

namespace {

void check_dims(const Mlp& net, const ProblemSpec& problem) {
  if (net.n_in() != problem.n_in() || net.n_out() != problem.n_out) {
    throw std::invalid_argument("network dims do not match problem " + problem.name);
  }
}

void check_samples(const SampleSet& s, const ProblemSpec& problem) {
  if (s.interior.cols() == 0 || s.initial.cols() == 0 || s.boundary.cols() == 0) {
    throw std::invalid_argument("sample sets must be non-empty");
  }
  if (s.interior.rows() != problem.n_in() || s.initial.rows() != problem.n_in() ||
      s.boundary.rows() != problem.n_in()) {
    throw std::invalid_argument("sample points have wrong dimension");
  }
}

std::vector<double> column(const PointMatrix& m, Eigen::Index k) {
  return std::vector<double>(m.col(k).data(), m.col(k).data() + m.rows());
}

// Combines adjacent pairs until one item is left; an odd tail is carried up.
template <typename T, typename Combine>
T pairwise_reduce(std::vector<T> items, Combine combine) {
  if (items.empty()) return T{};
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < items.size(); i += 2) {
      next.push_back(combine(std::move(items[i]), std::move(items[i + 1])));
    }
    if (items.size() % 2 == 1) next.push_back(std::move(items.back()));
    items = std::move(next);
  }
  return std::move(items.front());
}

enum class Term { kPde, kIc, kBc };

struct Block {
  Term term;
  Eigen::Index start;
  Eigen::Index count;
};

struct BlockResult {
  double sum = 0.0;
  std::vector<double> grad;
};

using ResidualDer = Eigen::Matrix<double, 14, 1>;
using AD = Eigen::AutoDiffScalar<ResidualDer>;

void run_interior_block(const Mlp& net, const ProblemSpec& problem, const PointMatrix& points,
                        double weight, BatchTrace& trace, Eigen::MatrixXd& adj, BlockResult& out) {
  const ChannelPlan plan = ChannelPlan::jets(problem.n_in(), problem.second_derivative_dims());
  batch_forward(net, points, plan, trace);
  const int B = trace.n_points;
  const int C = plan.count();
  const int n_out = problem.n_out;
  adj.setZero(trace.output.rows(), trace.output.cols());

  Fields<AD> f;
  f.n_in = problem.n_in();
  for (int k = 0; k < 2; ++k) {
    f.v[k] = AD(0.0);
    for (int i = 0; i < 3; ++i) {
      f.d[k][i] = AD(0.0);
      f.dd[k][i] = AD(0.0);
    }
  }
  const auto active = [&](int k, int c, int p) {
    return AD(trace.out(k, c, p), ResidualDer::RowsAtCompileTime, k * C + c);
  };

  double sum = 0.0;
  for (int p = 0; p < B; ++p) {
    for (int k = 0; k < n_out; ++k) {
      f.v[k] = active(k, 0, p);
      for (int i = 0; i < plan.n_in; ++i) f.d[k][i] = active(k, plan.first(i), p);
      for (std::size_t j = 0; j < plan.second.size(); ++j) {
        f.dd[k][plan.second[j]] = active(k, plan.second_slot(static_cast<int>(j)), p);
      }
    }
    const auto r = problem.residual_of(f);
    ResidualDer g = ResidualDer::Zero();
    for (int k = 0; k < n_out; ++k) {
      const double rk = r[k].value();
      sum += rk * rk;
      g += (2.0 * weight * rk) * r[k].derivatives();
    }
    for (int k = 0; k < n_out; ++k) {
      for (int c = 0; c < C; ++c) adj(k, static_cast<Eigen::Index>(c) * B + p) = g[k * C + c];
    }
  }
  out.sum = sum;
  batch_backward(net, trace, adj, out.grad);
}

void run_data_block(const Mlp& net, const ProblemSpec& problem, const PointMatrix& points,
                    double weight, BatchTrace& trace, Eigen::MatrixXd& adj, BlockResult& out) {
  batch_forward(net, points, ChannelPlan::value_only(problem.n_in()), trace);
  const int B = trace.n_points;
  adj.setZero(trace.output.rows(), trace.output.cols());
  double sum = 0.0;
  for (int p = 0; p < B; ++p) {
    const auto target = problem.exact(std::span<const double>(points.col(p).data(), points.rows()));
    for (int k = 0; k < problem.n_out; ++k) {
      const double e = trace.output(k, p) - target[k];
      sum += e * e;
      adj(k, p) = 2.0 * weight * e;
    }
  }
  out.sum = sum;
  batch_backward(net, trace, adj, out.grad);
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const int nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < n; i = next++) fn(w, i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<Block> make_blocks(Term term, Eigen::Index n) {
  std::vector<Block> blocks;
  for (Eigen::Index s = 0; s < n; s += kBlockSize) blocks.push_back({term, s, std::min<Eigen::Index>(kBlockSize, n - s)});
  return blocks;
}

}  // namespace

LossBreakdown compute_loss(const Mlp& net, const ProblemSpec& problem, const SampleSet& samples,
                           double lambda_ic, double lambda_bc) {
  check_dims(net, problem);
  check_samples(samples, problem);
  double pde = 0.0;
  for (Eigen::Index k = 0; k < samples.interior.cols(); ++k) {
    const auto p = column(samples.interior, k);
    const auto r = problem.residual(p, net.forward_jet(p));
    for (double v : r) pde += v * v;
  }
  auto data_term = [&](const PointMatrix& pts) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      const auto p = column(pts, k);
      const auto pred = net.forward(p);
      const auto target = problem.exact(p);
      for (int j = 0; j < problem.n_out; ++j) s += (pred[j] - target[j]) * (pred[j] - target[j]);
    }
    return s / static_cast<double>(pts.cols());
  };
  return make_breakdown(pde / static_cast<double>(samples.interior.cols()), data_term(samples.initial),
                        data_term(samples.boundary), lambda_ic, lambda_bc);
}

LossAndGradient loss_and_gradient(const Mlp& net, const ProblemSpec& problem,
                                  const SampleSet& samples, double lambda_ic, double lambda_bc,
                                  int workers) {
  check_dims(net, problem);
  check_samples(samples, problem);

  std::vector<Block> blocks = make_blocks(Term::kPde, samples.interior.cols());
  const std::size_t n_pde = blocks.size();
  for (const auto& b : make_blocks(Term::kIc, samples.initial.cols())) blocks.push_back(b);
  const std::size_t n_ic = blocks.size() - n_pde;
  for (const auto& b : make_blocks(Term::kBc, samples.boundary.cols())) blocks.push_back(b);

  const double n_r = static_cast<double>(samples.interior.cols());
  const double n_0 = static_cast<double>(samples.initial.cols());
  const double n_b = static_cast<double>(samples.boundary.cols());
  const std::size_t n_params = net.param_count();

  std::vector<BlockResult> results(blocks.size());
  const int nt = std::max(1, std::min<int>(workers, static_cast<int>(blocks.size())));
  std::vector<BatchTrace> traces(static_cast<std::size_t>(nt));
  std::vector<Eigen::MatrixXd> adjs(static_cast<std::size_t>(nt));
  std::vector<PointMatrix> scratch(static_cast<std::size_t>(nt));

  parallel_for(blocks.size(), nt, [&](int w, std::size_t i) {
    const Block& b = blocks[i];
    BlockResult& r = results[i];
    r.grad.assign(n_params, 0.0);
    switch (b.term) {
      case Term::kPde:
        scratch[w] = samples.interior.middleCols(b.start, b.count);
        run_interior_block(net, problem, scratch[w], 1.0 / n_r, traces[w], adjs[w], r);
        break;
      case Term::kIc:
        scratch[w] = samples.initial.middleCols(b.start, b.count);
        run_data_block(net, problem, scratch[w], lambda_ic / n_0, traces[w], adjs[w], r);
        break;
      case Term::kBc:
        scratch[w] = samples.boundary.middleCols(b.start, b.count);
        run_data_block(net, problem, scratch[w], lambda_bc / n_b, traces[w], adjs[w], r);
        break;
    }
  });

  auto term_sum = [&](std::size_t first, std::size_t count) {
    std::vector<double> sums;
    for (std::size_t i = first; i < first + count; ++i) sums.push_back(results[i].sum);
    return pairwise_reduce(std::move(sums), [](double a, double b) { return a + b; });
  };
  const double pde = term_sum(0, n_pde) / n_r;
  const double ic = term_sum(n_pde, n_ic) / n_0;
  const double bc = term_sum(n_pde + n_ic, blocks.size() - n_pde - n_ic) / n_b;

  std::vector<std::vector<double>> grads;
  grads.reserve(results.size());
  for (auto& r : results) grads.push_back(std::move(r.grad));
  LossAndGradient out;
  out.gradient = pairwise_reduce(std::move(grads), [](std::vector<double> a, std::vector<double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  });
  out.loss = make_breakdown(pde, ic, bc, lambda_ic, lambda_bc);
  return out;
}

LossAndGradient taped_loss_and_gradient(const Mlp& net, const ProblemSpec& problem,
                                        const SampleSet& samples, double lambda_ic,
                                        double lambda_bc) {
  check_dims(net, problem);
  check_samples(samples, problem);
  GradTape tape(problem.n_in());
  const auto params = register_parameters(tape, net);

  Var pde = tape.constant(0.0);
  for (Eigen::Index k = 0; k < samples.interior.cols(); ++k) {
    const auto p = column(samples.interior, k);
    const auto out = forward_jet(net, tape, params, p);
    Fields<Var> f;
    f.n_in = problem.n_in();
    for (int j = 0; j < problem.n_out; ++j) {
      f.v[j] = tape.value_of(out[j]);
      for (int i = 0; i < f.n_in; ++i) {
        f.d[j][i] = tape.d_of(out[j], i);
        f.dd[j][i] = tape.dd_of(out[j], i);
      }
    }
    const auto r = problem.residual_of(f);
    for (int j = 0; j < problem.n_out; ++j) pde = pde + r[j] * r[j];
  }
  auto data_term = [&](const PointMatrix& pts) {
    Var s = tape.constant(0.0);
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      const auto p = column(pts, k);
      const auto out = forward_jet(net, tape, params, p);
      const auto target = problem.exact(p);
      for (int j = 0; j < problem.n_out; ++j) {
        const Var e = tape.value_of(out[j]) - target[j];
        s = s + e * e;
      }
    }
    return s * (1.0 / static_cast<double>(pts.cols()));
  };
  const Var pde_mean = pde * (1.0 / static_cast<double>(samples.interior.cols()));
  const Var ic = data_term(samples.initial);
  const Var bc = data_term(samples.boundary);
  const Var total = pde_mean + lambda_ic * ic + lambda_bc * bc;
  tape.finalize(total);

  LossAndGradient out;
  out.loss = make_breakdown(pde_mean.value(), ic.value(), bc.value(), lambda_ic, lambda_bc);
  out.gradient = tape.param_gradient();
  return out;
}

namespace {
std::string describe_abort(int epoch, const LossBreakdown& l) {
  std::ostringstream ss;
  ss << "non-finite loss at epoch " << epoch << ": pde=" << l.pde << " ic=" << l.ic
     << " bc=" << l.bc << " total=" << l.total;
  return ss.str();
}
}  // namespace

TrainingAborted::TrainingAborted(int epoch, const LossBreakdown& loss)
    : std::runtime_error(describe_abort(epoch, loss)), epoch_(epoch), loss_(loss) {}

TrainResult train(const ProblemSpec& problem, const TrainConfig& config,
                  const TrainObserver& observer) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.net = make_network(problem, config.layers, config.width, config.seed);
  SampleSet samples = sample_problem(problem, config.counts, config.seed, 0);
  AdamOptions opts;
  opts.learning_rate = config.learning_rate;
  AdamState adam(result.net.param_count(), opts);
  std::vector<double> theta = result.net.get_params();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.resample && epoch > 0) {
      samples = sample_problem(problem, config.counts, config.seed, static_cast<std::uint64_t>(epoch));
    }
    const auto lg = loss_and_gradient(result.net, problem, samples, config.lambda_ic,
                                      config.lambda_bc, config.workers);
    if (!lg.loss.finite()) throw TrainingAborted(epoch, lg.loss);
    if (epoch % config.log_every == 0 || epoch + 1 == config.epochs) {
      result.history.push_back({epoch, lg.loss});
    }
    if (observer) observer(epoch, lg.loss);

    adam_step(adam, theta, lg.gradient);
    result.net.set_params(theta);
    result.epochs_run = epoch + 1;

    if (config.max_seconds > 0.0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > config.max_seconds && epoch + 1 < config.epochs) {
        if (result.history.empty() || result.history.back().epoch != epoch) {
          result.history.push_back({epoch, lg.loss});
        }
        result.hit_time_limit = true;
        break;
      }
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string loss_history_csv(std::span<const LossRecord> history) {
  std::string out = "epoch,pde,ic,bc,total\n";
  for (const auto& r : history) {
    out += std::to_string(r.epoch) + ',' + format_roundtrip(r.loss.pde) + ',' +
           format_roundtrip(r.loss.ic) + ',' + format_roundtrip(r.loss.bc) + ',' +
           format_roundtrip(r.loss.total) + '\n';
  }
  return out;
}

std::vector<LossRecord> parse_loss_history_csv(const std::string& text, double lambda_ic,
                                               double lambda_bc) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,pde,ic,bc,total") {
    throw std::runtime_error("loss history: unexpected header");
  }
  std::vector<LossRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::runtime_error("loss history: bad row '" + line + "'");
    LossRecord r;
    r.epoch = std::stoi(cells[0]);
    r.loss.pde = std::stod(cells[1]);
    r.loss.ic = std::stod(cells[2]);
    r.loss.bc = std::stod(cells[3]);
    r.loss.total = std::stod(cells[4]);
    r.loss.lambda_ic = lambda_ic;
    r.loss.lambda_bc = lambda_bc;
    out.push_back(r);
  }
  return out;
}

int moving_average_increases(std::span<const LossRecord> history, int window) {
  if (window < 1 || history.size() < static_cast<std::size_t>(window) + 1) return 0;
  int increases = 0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) sum += history[i].loss.total;
  double prev = sum / window;
  for (std::size_t i = window; i < history.size(); ++i) {
    sum += history[i].loss.total - history[i - window].loss.total;
    const double avg = sum / window;
    if (avg > prev) ++increases;
    prev = avg;
  }
  return increases;
}

}  // namespace pinn
