#include "pinn/problems.hpp"

#include <numbers>

namespace pinn {

std::vector<std::string> ProblemSpec::variable_names() const {
  if (n_out == 1) return {"u"};
  return {"u", "v"};
}

std::vector<int> ProblemSpec::second_derivative_dims() const {
  std::vector<int> dims;
  for (int i = 0; i < n_space; ++i) dims.push_back(i);
  return dims;
}

std::vector<double> ProblemSpec::lower_corner() const {
  std::vector<double> c;
  for (const auto& iv : space_box) c.push_back(iv.lo);
  c.push_back(0.0);
  return c;
}

std::vector<double> ProblemSpec::upper_corner() const {
  std::vector<double> c;
  for (const auto& iv : space_box) c.push_back(iv.hi);
  c.push_back(t_max);
  return c;
}

Fields<double> fields_from_jets(std::span<const Jet2> outputs, int n_out) {
  if (outputs.empty() || static_cast<int>(outputs.size()) != n_out) {
    throw std::invalid_argument("expected " + std::to_string(n_out) + " output jets");
  }
  Fields<double> f;
  f.n_in = outputs[0].n_in();
  for (int k = 0; k < n_out; ++k) {
    if (outputs[k].n_in() != f.n_in) throw std::invalid_argument("output jets differ in dimension");
    f.v[k] = outputs[k].value();
    for (int i = 0; i < f.n_in; ++i) {
      f.d[k][i] = outputs[k].d(i);
      f.dd[k][i] = outputs[k].dd(i);
    }
  }
  return f;
}

std::vector<double> ProblemSpec::residual(std::span<const double> point,
                                          std::span<const Jet2> outputs) const {
  if (point.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("residual: point has wrong dimension");
  }
  const Fields<double> f = fields_from_jets(outputs, n_out);
  if (f.n_in != n_in()) {
    throw std::invalid_argument("residual: jets carry " + std::to_string(f.n_in) +
                                " inputs, problem " + name + " needs " + std::to_string(n_in()));
  }
  const auto r = residual_of(f);
  return {r.begin(), r.begin() + n_out};
}

std::vector<double> ProblemSpec::exact(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("exact: point has wrong dimension");
  }
  const auto r = exact_of(point);
  return {r.begin(), r.begin() + n_out};
}

std::vector<Jet2> ProblemSpec::exact_jet(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("exact_jet: point has wrong dimension");
  }
  std::vector<Jet2> vars;
  for (int i = 0; i < n_in(); ++i) vars.push_back(Jet2::variable(point[i], i, n_in()));
  const auto r = exact_of(std::span<const Jet2>(vars));
  return {r.begin(), r.begin() + n_out};
}

bool ProblemSpec::on_initial_face(std::span<const double> point) const {
  return point[n_space] == 0.0;
}

bool ProblemSpec::on_spatial_boundary(std::span<const double> point) const {
  for (int i = 0; i < n_space; ++i) {
    if (point[i] == space_box[i].lo || point[i] == space_box[i].hi) return true;
  }
  return false;
}

std::vector<double> ProblemSpec::ic_bc_values(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("ic_bc_values: point has wrong dimension");
  }
  if (!on_initial_face(point) && !on_spatial_boundary(point)) {
    throw std::invalid_argument("ic_bc_values: point is neither on t=0 nor on the spatial boundary");
  }
  return exact(point);
}

namespace {

struct Entry {
  std::string_view name;
  ProblemId id;
};

constexpr Entry kRegistry[] = {
    {"ex1", ProblemId::kEx1}, {"ex2", ProblemId::kEx2}, {"ex3", ProblemId::kEx3},
    {"ex4", ProblemId::kEx4}, {"ex5", ProblemId::kEx5}, {"generalized", ProblemId::kGeneralized},
};

}  // namespace

std::string_view problem_name(ProblemId id) {
  for (const auto& e : kRegistry) {
    if (e.id == id) return e.name;
  }
  throw std::logic_error("unhandled problem id");
}

ProblemId problem_id_from_name(std::string_view name) {
  for (const auto& e : kRegistry) {
    if (e.name == name) return e.id;
  }
  throw UnknownProblemError(std::string(name));
}

std::vector<std::string> registered_problem_names() {
  std::vector<std::string> names;
  for (const auto& e : kRegistry) names.emplace_back(e.name);
  return names;
}

ProblemSpec make_problem(ProblemId id, const ProblemOverrides& overrides) {
  constexpr double pi = std::numbers::pi;
  ProblemSpec p;
  p.id = id;
  p.name = std::string(problem_name(id));
  switch (id) {
    case ProblemId::kEx1:
      p.space_box = {{-pi, pi}};
      p.t_max = 10.0;
      break;
    case ProblemId::kEx2:
      p.space_box = {{-10.0, 10.0}};
      p.t_max = 10.0;
      p.exact_is_solution = false;
      break;
    case ProblemId::kEx3:
      p.space_box = {{0.0, 1.0}};
      p.t_max = 1.0;
      p.coeffs.R = 1e6;
      p.coeffs.epsilon = 1e-6;
      break;
    case ProblemId::kEx4:
      p.n_space = 2;
      p.n_out = 1;
      p.space_box = {{0.0, 1.0}, {0.0, 1.0}};
      p.t_max = 1.0;
      p.coeffs.R = 80.0;
      break;
    case ProblemId::kEx5:
      p.n_space = 2;
      p.space_box = {{0.0, 1.0}, {0.0, 1.0}};
      p.t_max = 8.0;
      p.coeffs.R = 100.0;
      break;
    case ProblemId::kGeneralized:
      p.space_box = {{0.0, 1.0}};
      p.t_max = 1.0;
      p.coeffs.R = 1e6;
      p.coeffs.epsilon = 1e-6;
      p.coeffs.alpha = 2.0;
      p.coeffs.beta = -2.0;
      p.coeffs.gamma = 2.0;
      p.coeffs.delta = -2.0;
      break;
  }

  const bool uses_viscosity = id == ProblemId::kEx3 || id == ProblemId::kGeneralized;
  const bool uses_reynolds = uses_viscosity || id == ProblemId::kEx4 || id == ProblemId::kEx5;
  if (overrides.R) {
    if (!uses_reynolds) throw std::invalid_argument("problem " + p.name + " has no Reynolds number");
    if (!(*overrides.R > 0.0)) throw std::invalid_argument("R must be positive");
    p.coeffs.R = *overrides.R;
    if (uses_viscosity) p.coeffs.epsilon = 1.0 / *overrides.R;
  }
  if (overrides.epsilon) {
    if (!uses_viscosity) throw std::invalid_argument("problem " + p.name + " has no viscosity parameter");
    if (!(*overrides.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    p.coeffs.epsilon = *overrides.epsilon;
    p.coeffs.R = 1.0 / *overrides.epsilon;
  }
  if (id == ProblemId::kGeneralized) {
    p.exact_is_solution = p.coeffs.alpha + p.coeffs.beta == 0.0 && p.coeffs.gamma + p.coeffs.delta == 0.0;
  }
  return p;
}

ProblemSpec make_problem(std::string_view name, const ProblemOverrides& overrides) {
  return make_problem(problem_id_from_name(name), overrides);
}

}  // namespace pinn
