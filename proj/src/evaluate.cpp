#include "pinn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinn/io.hpp"
#include "pinn/random.hpp"
#include "pinn/sampling.hpp"

namespace pinn {

std::string_view l2_norm_name(L2Norm n) {
  switch (n) {
    case L2Norm::kRms: return "rms";
    case L2Norm::kAbsolute: return "absolute";
    case L2Norm::kRelative: return "relative";
  }
  return "rms";
}

L2Norm l2_norm_from_name(std::string_view name) {
  if (name == "rms") return L2Norm::kRms;
  if (name == "absolute") return L2Norm::kAbsolute;
  if (name == "relative") return L2Norm::kRelative;
  throw std::invalid_argument("unknown L2 norm '" + std::string(name) + "'");
}

NormPair norms_from_errors(std::span<const double> errors, L2Norm norm,
                           std::span<const double> exact) {
  if (errors.empty()) throw std::invalid_argument("no error samples");
  NormPair n;
  double sq = 0.0;
  for (double e : errors) {
    n.linf = std::max(n.linf, std::abs(e));
    sq += e * e;
  }
  switch (norm) {
    case L2Norm::kRms:
      n.l2 = std::sqrt(sq / static_cast<double>(errors.size()));
      break;
    case L2Norm::kAbsolute:
      n.l2 = std::sqrt(sq);
      break;
    case L2Norm::kRelative: {
      if (exact.size() != errors.size()) throw std::invalid_argument("relative L2 needs exact values");
      double ref = 0.0;
      for (double v : exact) ref += v * v;
      n.l2 = ref > 0.0 ? std::sqrt(sq / ref) : std::sqrt(sq);
      break;
    }
  }
  return n;
}

int default_grid_n(const ProblemSpec& problem) { return problem.n_space == 1 ? 1001 : 101; }

std::vector<std::vector<double>> evaluation_grid(const ProblemSpec& problem, double t, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be at least 2");
  if (!(t >= 0.0 && t <= problem.t_max)) {
    throw std::invalid_argument("evaluation time " + std::to_string(t) + " outside [0, " +
                                std::to_string(problem.t_max) + "] for " + problem.name);
  }
  auto coord = [&](int d, int k) {
    const auto& iv = problem.space_box[d];
    if (k == grid_n - 1) return iv.hi;
    return iv.lo + (iv.hi - iv.lo) * static_cast<double>(k) / (grid_n - 1);
  };
  std::vector<std::vector<double>> pts;
  if (problem.n_space == 1) {
    for (int i = 0; i < grid_n; ++i) pts.push_back({coord(0, i), t});
  } else {
    for (int j = 0; j < grid_n; ++j) {
      for (int i = 0; i < grid_n; ++i) pts.push_back({coord(0, i), coord(1, j), t});
    }
  }
  return pts;
}

std::vector<NormPair> error_norms(const Mlp& net, const ProblemSpec& problem, double t, int grid_n,
                                  L2Norm norm) {
  if (net.n_in() != problem.n_in() || net.n_out() != problem.n_out) {
    throw std::invalid_argument("network dims do not match problem " + problem.name);
  }
  const auto grid = evaluation_grid(problem, t, grid_n);
  std::vector<std::vector<double>> err(problem.n_out), ex(problem.n_out);
  for (const auto& p : grid) {
    const auto pred = net.forward(p);
    const auto exact = problem.exact(p);
    for (int k = 0; k < problem.n_out; ++k) {
      err[k].push_back(pred[k] - exact[k]);
      ex[k].push_back(exact[k]);
    }
  }
  std::vector<NormPair> out;
  for (int k = 0; k < problem.n_out; ++k) out.push_back(norms_from_errors(err[k], norm, ex[k]));
  return out;
}

ErrorReport report(const Mlp& net, const ProblemSpec& problem, std::span<const double> times,
                   int grid_n, L2Norm norm) {
  if (times.empty()) throw std::invalid_argument("report needs at least one evaluation time");
  ErrorReport r;
  r.problem = problem.name;
  r.variables = problem.variable_names();
  r.grid_n = grid_n;
  r.norm = norm;
  for (double t : times) {
    r.times.push_back(t);
    r.rows.push_back(error_norms(net, problem, t, grid_n, norm));
  }
  return r;
}

std::string report_csv(const ErrorReport& r) {
  std::string out = "t";
  for (const auto& v : r.variables) out += "," + v + "_Linf," + v + "_L2";
  out += '\n';
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out += format_roundtrip(r.times[i]);
    for (const auto& n : r.rows[i]) out += "," + format_sci4(n.linf) + "," + format_sci4(n.l2);
    out += '\n';
  }
  return out;
}

ErrorReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("report csv: empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::istringstream ls(s);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    return cells;
  };
  const auto header = split(line);
  if (header.empty() || header[0] != "t" || header.size() % 2 != 1) {
    throw std::runtime_error("report csv: bad header");
  }
  ErrorReport r;
  for (std::size_t i = 1; i < header.size(); i += 2) {
    const auto& h = header[i];
    const auto pos = h.rfind("_Linf");
    if (pos == std::string::npos || header[i + 1] != h.substr(0, pos) + "_L2") {
      throw std::runtime_error("report csv: bad column pair " + h);
    }
    r.variables.push_back(h.substr(0, pos));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw std::runtime_error("report csv: ragged row");
    r.times.push_back(std::stod(cells[0]));
    std::vector<NormPair> row;
    for (std::size_t i = 1; i < cells.size(); i += 2) row.push_back({std::stod(cells[i]), std::stod(cells[i + 1])});
    r.rows.push_back(row);
  }
  return r;
}

nlohmann::json report_json(const ErrorReport& r) {
  nlohmann::json j;
  j["problem"] = r.problem;
  j["grid_n"] = r.grid_n;
  j["l2_norm"] = std::string(l2_norm_name(r.norm));
  j["variables"] = r.variables;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    nlohmann::json row;
    row["t"] = r.times[i];
    for (std::size_t k = 0; k < r.variables.size(); ++k) {
      row[r.variables[k]] = {{"Linf", r.rows[i][k].linf}, {"L2", r.rows[i][k].l2}};
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["config"] = r.config;
  return j;
}

double exactness_oracle(const ProblemSpec& problem, int n_points, std::uint64_t seed) {
  const Eigen::MatrixXd u = lhs(n_points, problem.n_in(), stream_seed(seed, Stream::kOracle));
  const auto lo = problem.lower_corner();
  const auto hi = problem.upper_corner();
  double worst = 0.0;
  std::vector<double> p(static_cast<std::size_t>(problem.n_in()));
  for (int k = 0; k < n_points; ++k) {
    for (int d = 0; d < problem.n_in(); ++d) p[d] = lo[d] + u(d, k) * (hi[d] - lo[d]);
    const auto r = problem.residual(p, problem.exact_jet(p));
    for (double v : r) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

double validation_time_for(const ProblemSpec& problem) {
  return problem.t_max >= 1.0 ? 1.0 : 0.5 * problem.t_max;
}

std::optional<std::size_t> select_best(std::span<const SweepCell> cells) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].ok) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = cells[i].objective;
    const auto& b = cells[*best].objective;
    if (a.linf < b.linf || (a.linf == b.linf && a.l2 < b.l2)) best = i;
  }
  return best;
}

SweepResult run_sweep_cells(const ProblemSpec& problem, std::span<const TrainConfig> configs,
                            int grid_n) {
  SweepResult res;
  res.problem = problem.name;
  res.validation_time = validation_time_for(problem);
  res.grid_n = grid_n;
  for (const auto& cfg : configs) {
    SweepCell cell;
    cell.layers = cfg.layers;
    cell.width = cfg.width;
    try {
      const auto trained = train(problem, cfg);
      const auto norms = error_norms(trained.net, problem, res.validation_time, grid_n);
      for (const auto& n : norms) {
        cell.objective.linf = std::max(cell.objective.linf, n.linf);
        cell.objective.l2 = std::max(cell.objective.l2, n.l2);
      }
      cell.final_loss = trained.history.back().loss.total;
      cell.ok = std::isfinite(cell.objective.linf) && std::isfinite(cell.objective.l2);
      if (!cell.ok) cell.error = "non-finite validation error";
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    res.cells.push_back(cell);
    res.configs.push_back(cfg);
  }
  res.best = select_best(res.cells);
  return res;
}

SweepResult sweep(const ProblemSpec& problem, std::span<const int> layer_set,
                  std::span<const int> width_set, const TrainConfig& base, int grid_n) {
  if (layer_set.empty() || width_set.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  std::vector<TrainConfig> configs;
  for (int L : layer_set) {
    for (int H : width_set) {
      TrainConfig c = base;
      c.layers = L;
      c.width = H;
      configs.push_back(c);
    }
  }
  return run_sweep_cells(problem, configs, grid_n);
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "layers,width,status,linf,l2,final_loss,selected\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    out += std::to_string(c.layers) + ',' + std::to_string(c.width) + ',' + (c.ok ? "ok" : "failed") + ',';
    if (c.ok) {
      out += format_sci4(c.objective.linf) + ',' + format_sci4(c.objective.l2) + ',' +
             format_sci4(c.final_loss);
    } else {
      out += ",,";
    }
    out += ',' + std::string(r.best && *r.best == i ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace pinn
