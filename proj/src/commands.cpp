#include "pinn/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <stdexcept>

#include "pinn/evaluate.hpp"
#include "pinn/io.hpp"
#include "pinn/random.hpp"
#include "pinn/sampling.hpp"
#include "pinn/training.hpp"

namespace pinn {
namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UnknownProblemError& e) {
    log << "error: " << e.what() << "; known ids:";
    for (const auto& n : registered_problem_names()) log << ' ' << n;
    log << '\n';
    return kExitUnknownProblem;
  } catch (const TrainingAborted& e) {
    log << "error: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string plot_header(const ProblemSpec& problem) {
  std::string h = problem.n_space == 1 ? "x,t" : "x,y,t";
  for (const auto& v : problem.variable_names()) h += "," + v + "_pred," + v + "_exact," + v + "_abs_err";
  return h + '\n';
}

void append_plot_row(std::string& out, const Mlp& net, const ProblemSpec& problem,
                     std::span<const double> p) {
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "," : "") + format_roundtrip(p[i]);
  const auto pred = net.forward(p);
  const auto exact = problem.exact(p);
  for (int k = 0; k < problem.n_out; ++k) {
    out += "," + format_roundtrip(pred[k]) + "," + format_roundtrip(exact[k]) + "," +
           format_roundtrip(std::abs(pred[k] - exact[k]));
  }
  out += '\n';
}

void require_matching_dims(const Mlp& net, const ProblemSpec& problem) {
  if (net.n_in() != problem.n_in() || net.n_out() != problem.n_out) {
    throw IoError("checkpoint dims (" + std::to_string(net.n_in()) + " in, " + std::to_string(net.n_out()) +
                  " out) do not match problem " + problem.name + " (" + std::to_string(problem.n_in()) +
                  " in, " + std::to_string(problem.n_out) + " out)");
  }
}

Mlp read_checkpoint(const fs::path& path) {
  try {
    return load_checkpoint(path);
  } catch (const std::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
}

void write_all(const fs::path& dir, const std::map<std::string, std::string>& files) {
  try {
    for (const auto& [name, text] : files) write_file_atomic(dir / name, text);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

void print_report(std::ostream& log, const ErrorReport& r) {
  log << "t";
  for (const auto& v : r.variables) log << "  " << v << "_Linf  " << v << "_L2";
  log << '\n';
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    log << format_roundtrip(r.times[i]);
    for (const auto& n : r.rows[i]) log << "  " << format_sci4(n.linf) << "  " << format_sci4(n.l2);
    log << '\n';
  }
}

double gradient_check(const ProblemSpec& problem) {
  const std::uint64_t seed = 7;
  const Mlp net = make_network(problem, 3, 20, seed);
  const SampleSet samples = sample_problem(problem, {64, 16, 16}, seed);
  const auto lg = loss_and_gradient(net, problem, samples, 10.0, 10.0);
  auto theta = net.get_params();
  auto engine = make_engine(seed, Stream::kTest, {0x67726164});
  Mlp probe = net;
  auto loss_at = [&](std::size_t i, double v) {
    const double saved = theta[i];
    theta[i] = v;
    probe.set_params(theta);
    theta[i] = saved;
    return loss_and_gradient(probe, problem, samples, 10.0, 10.0).loss.total;
  };
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = uniform_index(engine, theta.size());
    const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
    const double fd = (loss_at(i, theta[i] + h) - loss_at(i, theta[i] - h)) / (2.0 * h);
    const double g = lg.gradient[i];
    const double denom = std::max({std::abs(g), std::abs(fd), 1e-6});
    worst = std::max(worst, std::abs(g - fd) / denom);
  }
  return worst;
}

}  // namespace

std::map<std::string, std::string> plot_data_files(const Mlp& net, const ProblemSpec& problem,
                                                   const std::vector<double>& times, int grid_n,
                                                   int spacetime_n) {
  require_matching_dims(net, problem);
  std::map<std::string, std::string> files;
  const std::string header = plot_header(problem);
  for (double t : times) {
    std::string out = header;
    for (const auto& p : evaluation_grid(problem, t, grid_n)) append_plot_row(out, net, problem, p);
    files["plot_t" + format_roundtrip(t) + ".csv"] = std::move(out);
  }
  std::string st = header;
  for (int k = 0; k < spacetime_n; ++k) {
    const double t = k == spacetime_n - 1 ? problem.t_max : problem.t_max * k / (spacetime_n - 1);
    for (const auto& p : evaluation_grid(problem, t, spacetime_n)) append_plot_row(st, net, problem, p);
  }
  files["plot_spacetime.csv"] = std::move(st);
  return files;
}

int cmd_solve(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const ProblemSpec problem = config.make_problem();
    const TrainConfig& tc = config.train;
    for (double t : config.times) evaluation_grid(problem, t, 2);
    log << "solve " << problem.name << ": L=" << tc.layers << " H=" << tc.width << " E=" << tc.epochs
        << " seed=" << tc.seed << " N_r=" << tc.counts.interior << " N_0=" << tc.counts.initial
        << " N_b=" << tc.counts.boundary << '\n';
    const int stride = std::max(1, tc.epochs / 20);
    const auto observer = [&](int epoch, const LossBreakdown& l) {
      if (epoch % stride == 0 || epoch == tc.epochs) {
        log << "epoch " << epoch << "  total " << format_sci4(l.total) << "  pde " << format_sci4(l.pde)
            << "  ic " << format_sci4(l.ic) << "  bc " << format_sci4(l.bc) << '\n';
      }
    };
    const TrainResult result = train(problem, tc, observer);
    if (result.hit_time_limit) log << "wallclock limit reached after " << result.epochs_run << " epochs\n";

    ErrorReport rep = report(result.net, problem, config.times, config.grid_n, config.l2_norm);
    rep.config = config_snapshot(config);
    print_report(log, rep);

    std::map<std::string, std::string> files;
    files["config.txt"] = serialize_run_config(config);
    const auto ck = serialize_checkpoint(result.net);
    files["checkpoint.bin"] = std::string(ck.begin(), ck.end());
    files["loss_history.csv"] = loss_history_csv(result.history);
    if (config.write_csv) files["error_report.csv"] = report_csv(rep);
    if (config.write_json) files["error_report.json"] = report_json(rep).dump(2) + "\n";
    files.merge(plot_data_files(result.net, problem, config.times, config.grid_n, config.spacetime_n));
    write_all(config.output_dir, files);
    log << "wrote " << files.size() << " artifacts to " << config.output_dir << '\n';
    return static_cast<int>(kExitOk);
  });
}

CheckOutcome run_check(const ProblemSpec& problem) {
  CheckOutcome c;
  c.problem = problem.name;
  c.oracle_residual = exactness_oracle(problem, 1000, 42);
  c.oracle_enforced = problem.exact_is_solution;
  c.gradient_rel_error = gradient_check(problem);
  const bool oracle_ok = !c.oracle_enforced || c.oracle_residual < 1e-8;
  c.passed = oracle_ok && c.gradient_rel_error < 1e-4;
  return c;
}

int cmd_check(const std::vector<std::string>& problem_ids, std::ostream& log) {
  return guarded(log, [&] {
    std::vector<std::string> ids = problem_ids;
    if (ids.empty()) ids = {"ex1", "ex2", "ex3", "ex4", "ex5"};
    std::vector<ProblemSpec> problems;
    for (const auto& id : ids) problems.push_back(make_problem(id));
    bool all = true;
    for (const auto& p : problems) {
      const CheckOutcome c = run_check(p);
      log << c.problem << "  oracle_residual " << format_sci4(c.oracle_residual)
          << (c.oracle_enforced ? (c.oracle_residual < 1e-8 ? " (pass)" : " (FAIL)") : " (report only)")
          << "  gradient_rel_err " << format_sci4(c.gradient_rel_error)
          << (c.gradient_rel_error < 1e-4 ? " (pass)" : " (FAIL)") << '\n';
      all = all && c.passed;
    }
    return static_cast<int>(all ? kExitOk : kExitCheckFailed);
  });
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const ProblemSpec problem = config.make_problem();
    if (config.sweep_layers.empty() || config.sweep_widths.empty()) {
      throw ConfigError("sweep_layers and sweep_widths must be non-empty");
    }
    std::vector<TrainConfig> configs;
    for (int L : config.sweep_layers) {
      for (int H : config.sweep_widths) {
        TrainConfig c = config.train;
        c.layers = L;
        c.width = H;
        c.validate();
        configs.push_back(c);
      }
    }
    log << "sweep " << problem.name << ": " << configs.size() << " cells, validation t="
        << format_roundtrip(validation_time_for(problem)) << '\n';
    SweepResult res = run_sweep_cells(problem, configs, config.grid_n);
    for (const auto& c : res.cells) {
      log << "L=" << c.layers << " H=" << c.width << "  ";
      if (c.ok) {
        log << "Linf " << format_sci4(c.objective.linf) << "  L2 " << format_sci4(c.objective.l2) << '\n';
      } else {
        log << "failed: " << c.error << '\n';
      }
    }
    std::map<std::string, std::string> files;
    files["sweep.csv"] = sweep_csv(res);
    if (!res.best) {
      write_all(config.output_dir, files);
      log << "error: every sweep cell failed\n";
      return static_cast<int>(kExitSweepFailed);
    }
    RunConfig selected = config;
    selected.train = res.configs[*res.best];
    files["selected_config.txt"] = serialize_run_config(selected);
    write_all(config.output_dir, files);
    log << "selected L=" << selected.train.layers << " H=" << selected.train.width << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_export(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const ProblemSpec problem = config.make_problem();
    const fs::path ck = config.checkpoint.empty() ? fs::path(config.output_dir) / "checkpoint.bin"
                                                  : fs::path(config.checkpoint);
    if (!fs::exists(ck)) throw IoError("checkpoint not found: " + ck.string());
    const Mlp net = read_checkpoint(ck);
    require_matching_dims(net, problem);
    const auto files = plot_data_files(net, problem, config.times, config.grid_n, config.spacetime_n);
    write_all(config.output_dir, files);
    log << "wrote " << files.size() << " plot files to " << config.output_dir << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace pinn
