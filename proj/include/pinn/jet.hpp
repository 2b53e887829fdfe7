#ifndef PINN_JET_HPP_
#define PINN_JET_HPP_

#include <array>
#include <cmath>
#include <span>

namespace pinn {

// Second-order forward-mode jet: a value, its gradient with respect to up to
// three inputs, and the diagonal of its Hessian. Products and compositions
// only ever need the diagonal terms of their operands, so no cross partials
// are tracked.
class Jet2 {
 public:
  static constexpr int kMaxInputs = 3;

  Jet2() = default;

  // Constant jet: all derivative channels are zero.
  static Jet2 constant(double c, int n_in);
  // The i-th input variable x_i: d = e_i, dd = 0.
  static Jet2 variable(double x, int i, int n_in);

  int n_in() const { return n_in_; }
  double value() const { return value_; }
  double d(int i) const { return d_[i]; }
  double dd(int i) const { return dd_[i]; }
  std::span<const double> d() const { return {d_.data(), static_cast<std::size_t>(n_in_)}; }
  std::span<const double> dd() const { return {dd_.data(), static_cast<std::size_t>(n_in_)}; }

  double& value() { return value_; }
  double& d(int i) { return d_[i]; }
  double& dd(int i) { return dd_[i]; }

  // Apply a scalar function f given f(a), f'(a), f''(a) at a = value().
  Jet2 compose(double f0, double f1, double f2) const;

  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);
  Jet2& operator*=(double k);

 private:
  double value_ = 0.0;
  std::array<double, kMaxInputs> d_{};
  std::array<double, kMaxInputs> dd_{};
  int n_in_ = 0;
};

Jet2 jet_const(double c, int n_in);
Jet2 jet_var(double x, int i, int n_in);

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);

Jet2 operator+(const Jet2& a, double c);
Jet2 operator+(double c, const Jet2& a);
Jet2 operator-(const Jet2& a, double c);
Jet2 operator-(double c, const Jet2& a);
Jet2 operator*(const Jet2& a, double k);
Jet2 operator*(double k, const Jet2& a);
Jet2 operator/(const Jet2& a, double k);
Jet2 operator/(double c, const Jet2& a);

Jet2 tanh(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 reciprocal(const Jet2& a);

}  // namespace pinn

#endif  // PINN_JET_HPP_
