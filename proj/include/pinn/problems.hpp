#ifndef PINN_PROBLEMS_HPP_
#define PINN_PROBLEMS_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinn/jet.hpp"

namespace pinn {

enum class ProblemId { kEx1, kEx2, kEx3, kEx4, kEx5, kGeneralized };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Physical coefficients. Each problem reads only the ones it uses.
struct CoeffSet {
  double epsilon = 1.0;  // viscosity
  double R = 1.0;        // Reynolds number
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
  double c1 = 0.1, c2 = 0.3;  // (uv)_x couplings of ex2
};

// Output fields and their input derivatives at one point, for any scalar type
// that supports +, -, * and scaling by double. Input order is (x, t) in 1D and
// (x, y, t) in 2D, so t is always the last index.
template <typename S>
struct Fields {
  int n_in = 2;
  std::array<S, 2> v{};
  std::array<std::array<S, 3>, 2> d{};
  std::array<std::array<S, 3>, 2> dd{};

  const S& val(int k) const { return v[k]; }
  const S& dx(int k) const { return d[k][0]; }
  const S& dy(int k) const { return d[k][1]; }
  const S& dt(int k) const { return d[k][n_in - 1]; }
  const S& dxx(int k) const { return dd[k][0]; }
  const S& dyy(int k) const { return dd[k][1]; }
};

// u_t - u_xx - 2 u u_x + (uv)_x, symmetric in v.
template <typename S>
std::array<S, 2> residual_ex1(const Fields<S>& f) {
  const S uv_x = f.val(0) * f.dx(1) + f.val(1) * f.dx(0);
  return {f.dt(0) - f.dxx(0) - 2.0 * (f.val(0) * f.dx(0)) + uv_x,
          f.dt(1) - f.dxx(1) - 2.0 * (f.val(1) * f.dx(1)) + uv_x};
}

// u_t - u_xx - 2 u u_x + c1 (uv)_x ; v_t - v_xx - 2 v v_x + c2 (uv)_x.
template <typename S>
std::array<S, 2> residual_ex2(const Fields<S>& f, const CoeffSet& c) {
  const S uv_x = f.val(0) * f.dx(1) + f.val(1) * f.dx(0);
  return {f.dt(0) - f.dxx(0) - 2.0 * (f.val(0) * f.dx(0)) + c.c1 * uv_x,
          f.dt(1) - f.dxx(1) - 2.0 * (f.val(1) * f.dx(1)) + c.c2 * uv_x};
}

// u_t - eps u_xx + 2 u u_x - (uv)_x, symmetric in v.
template <typename S>
std::array<S, 2> residual_ex3(const Fields<S>& f, const CoeffSet& c) {
  const S uv_x = f.val(0) * f.dx(1) + f.val(1) * f.dx(0);
  return {f.dt(0) - c.epsilon * f.dxx(0) + 2.0 * (f.val(0) * f.dx(0)) - uv_x,
          f.dt(1) - c.epsilon * f.dxx(1) + 2.0 * (f.val(1) * f.dx(1)) - uv_x};
}

// u_t - (u_xx + u_yy)/R + u u_x + u u_y. Single output; slot 1 is zero.
template <typename S>
std::array<S, 2> residual_ex4(const Fields<S>& f, const CoeffSet& c) {
  const S& u = f.val(0);
  return {f.dt(0) - (1.0 / c.R) * (f.dxx(0) + f.dyy(0)) + u * f.dx(0) + u * f.dy(0), S{}};
}

// u_t + u u_x + v u_y - (u_xx + u_yy)/R ; v_t + u v_x + v v_y - (v_xx + v_yy)/R.
template <typename S>
std::array<S, 2> residual_ex5(const Fields<S>& f, const CoeffSet& c) {
  const S& u = f.val(0);
  const S& v = f.val(1);
  const double nu = 1.0 / c.R;
  return {f.dt(0) + u * f.dx(0) + v * f.dy(0) - nu * (f.dxx(0) + f.dyy(0)),
          f.dt(1) + u * f.dx(1) + v * f.dy(1) - nu * (f.dxx(1) + f.dyy(1))};
}

// u_t + alpha u u_x + beta v u_x - eps u_xx ; v_t + gamma v v_x + delta u v_x - eps v_xx.
template <typename S>
std::array<S, 2> residual_generalized(const Fields<S>& f, const CoeffSet& c) {
  const S& u = f.val(0);
  const S& v = f.val(1);
  return {f.dt(0) + c.alpha * (u * f.dx(0)) + c.beta * (v * f.dx(0)) - c.epsilon * f.dxx(0),
          f.dt(1) + c.gamma * (v * f.dx(1)) + c.delta * (u * f.dx(1)) - c.epsilon * f.dxx(1)};
}

// Closed-form solutions, templated so Jet2 inputs yield exact derivative jets.
// Arguments are (x, t) in 1D and (x, y, t) in 2D.
template <typename S>
std::array<S, 2> exact_ex1(const S& x, const S& t) {
  using std::exp;
  using std::sin;
  const S u = exp(-t) * sin(x);
  return {u, u};
}

template <typename S>
std::array<S, 2> exact_ex2(const S& x, const S& t) {
  using std::tanh;
  const S w = tanh(-0.00625 * (x + 0.0125 * t));
  return {0.05 * (1.0 - w), 0.05 * (-0.5 - w)};
}

template <typename S>
std::array<S, 2> exact_ex3(const S& x, const S& t, double epsilon) {
  using std::cos;
  using std::exp;
  constexpr double pi = std::numbers::pi;
  const S u = exp(-epsilon * pi * pi * t) * cos(pi * x);
  return {u, u};
}

template <typename S>
std::array<S, 2> exact_ex4(const S& x, const S& y, const S& t, double R) {
  using std::exp;
  return {1.0 / (1.0 + exp(0.5 * R * (x + y - t))), S{}};
}

template <typename S>
std::array<S, 2> exact_ex5(const S& x, const S& y, const S& t, double R) {
  using std::exp;
  const S q = 0.25 / (1.0 + exp((R / 32.0) * (4.0 * y - 4.0 * x - t)));
  return {0.75 - q, 0.75 + q};
}

class UnknownProblemError : public std::invalid_argument {
 public:
  explicit UnknownProblemError(const std::string& id)
      : std::invalid_argument("unknown problem id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class ProblemSpec {
 public:
  ProblemId id = ProblemId::kEx1;
  std::string name;
  int n_space = 1;
  int n_out = 2;
  std::vector<Interval> space_box;
  double t_max = 1.0;
  CoeffSet coeffs;
  // False when the closed form is only a reference profile (ex2, and the
  // generalized system unless alpha + beta = gamma + delta = 0).
  bool exact_is_solution = true;

  int n_in() const { return n_space + 1; }
  std::vector<std::string> variable_names() const;
  // Spatial dimensions whose second derivative the residual needs.
  std::vector<int> second_derivative_dims() const;
  // Lower / upper corners of space_box x [0, t_max].
  std::vector<double> lower_corner() const;
  std::vector<double> upper_corner() const;

  template <typename S>
  std::array<S, 2> residual_of(const Fields<S>& f) const {
    switch (id) {
      case ProblemId::kEx1: return residual_ex1(f);
      case ProblemId::kEx2: return residual_ex2(f, coeffs);
      case ProblemId::kEx3: return residual_ex3(f, coeffs);
      case ProblemId::kEx4: return residual_ex4(f, coeffs);
      case ProblemId::kEx5: return residual_ex5(f, coeffs);
      case ProblemId::kGeneralized: return residual_generalized(f, coeffs);
    }
    throw std::logic_error("unhandled problem id");
  }

  template <typename S>
  std::array<S, 2> exact_of(std::span<const S> p) const {
    switch (id) {
      case ProblemId::kEx1: return exact_ex1(p[0], p[1]);
      case ProblemId::kEx2: return exact_ex2(p[0], p[1]);
      case ProblemId::kEx3: return exact_ex3(p[0], p[1], coeffs.epsilon);
      case ProblemId::kEx4: return exact_ex4(p[0], p[1], p[2], coeffs.R);
      case ProblemId::kEx5: return exact_ex5(p[0], p[1], p[2], coeffs.R);
      case ProblemId::kGeneralized: return exact_ex3(p[0], p[1], coeffs.epsilon);
    }
    throw std::logic_error("unhandled problem id");
  }

  // Residual vector (length n_out) from output jets at a point.
  std::vector<double> residual(std::span<const double> point, std::span<const Jet2> outputs) const;
  std::vector<double> exact(std::span<const double> point) const;
  std::vector<Jet2> exact_jet(std::span<const double> point) const;
  // Dirichlet data on the t = 0 face or the spatial boundary.
  std::vector<double> ic_bc_values(std::span<const double> point) const;

  bool on_initial_face(std::span<const double> point) const;
  bool on_spatial_boundary(std::span<const double> point) const;
};

// Fields<double> from network output jets.
Fields<double> fields_from_jets(std::span<const Jet2> outputs, int n_out);

struct ProblemOverrides {
  std::optional<double> R;
  std::optional<double> epsilon;
};

ProblemSpec make_problem(ProblemId id, const ProblemOverrides& overrides = {});
// Registry lookup by id string: ex1..ex5, generalized.
ProblemSpec make_problem(std::string_view name, const ProblemOverrides& overrides = {});
ProblemId problem_id_from_name(std::string_view name);
std::string_view problem_name(ProblemId id);
std::vector<std::string> registered_problem_names();

}  // namespace pinn

#endif  // PINN_PROBLEMS_HPP_
