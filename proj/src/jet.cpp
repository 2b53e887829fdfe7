#include "pinn/jet.hpp"

#include <stdexcept>
#include <string>

namespace pinn {
namespace {

void check_n_in(int n_in) {
  if (n_in < 1 || n_in > Jet2::kMaxInputs) {
    throw std::invalid_argument("jet input dimension must be in [1, 3], got " +
                                std::to_string(n_in));
  }
}

void check_same(const Jet2& a, const Jet2& b) {
  if (a.n_in() != b.n_in()) {
    throw std::invalid_argument("jet input dimension mismatch: " + std::to_string(a.n_in()) +
                                " vs " + std::to_string(b.n_in()));
  }
}

}  // namespace

Jet2 Jet2::constant(double c, int n_in) {
  check_n_in(n_in);
  Jet2 j;
  j.value_ = c;
  j.n_in_ = n_in;
  return j;
}

Jet2 Jet2::variable(double x, int i, int n_in) {
  check_n_in(n_in);
  if (i < 0 || i >= n_in) {
    throw std::out_of_range("jet variable index " + std::to_string(i) + " out of range for " +
                            std::to_string(n_in) + " inputs");
  }
  Jet2 j = constant(x, n_in);
  j.d_[i] = 1.0;
  return j;
}

Jet2 Jet2::compose(double f0, double f1, double f2) const {
  Jet2 r;
  r.n_in_ = n_in_;
  r.value_ = f0;
  for (int i = 0; i < n_in_; ++i) {
    r.d_[i] = f1 * d_[i];
    r.dd_[i] = f2 * d_[i] * d_[i] + f1 * dd_[i];
  }
  return r;
}

Jet2& Jet2::operator+=(const Jet2& o) {
  check_same(*this, o);
  value_ += o.value_;
  for (int i = 0; i < n_in_; ++i) {
    d_[i] += o.d_[i];
    dd_[i] += o.dd_[i];
  }
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  check_same(*this, o);
  value_ -= o.value_;
  for (int i = 0; i < n_in_; ++i) {
    d_[i] -= o.d_[i];
    dd_[i] -= o.dd_[i];
  }
  return *this;
}

Jet2& Jet2::operator*=(double k) {
  value_ *= k;
  for (int i = 0; i < n_in_; ++i) {
    d_[i] *= k;
    dd_[i] *= k;
  }
  return *this;
}

Jet2 jet_const(double c, int n_in) { return Jet2::constant(c, n_in); }
Jet2 jet_var(double x, int i, int n_in) { return Jet2::variable(x, i, n_in); }

Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r += b;
  return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r -= b;
  return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  check_same(a, b);
  Jet2 r = Jet2::constant(a.value() * b.value(), a.n_in());
  for (int i = 0; i < a.n_in(); ++i) {
    r.d(i) = a.d(i) * b.value() + a.value() * b.d(i);
    r.dd(i) = a.dd(i) * b.value() + 2.0 * a.d(i) * b.d(i) + a.value() * b.dd(i);
  }
  return r;
}

// q = a / b from a = q b.
Jet2 operator/(const Jet2& a, const Jet2& b) {
  check_same(a, b);
  const double q = a.value() / b.value();
  Jet2 r = Jet2::constant(q, a.n_in());
  for (int i = 0; i < a.n_in(); ++i) {
    r.d(i) = (a.d(i) - q * b.d(i)) / b.value();
    r.dd(i) = (a.dd(i) - 2.0 * r.d(i) * b.d(i) - q * b.dd(i)) / b.value();
  }
  return r;
}

Jet2 operator-(const Jet2& a) { return a * -1.0; }

Jet2 operator+(const Jet2& a, double c) {
  Jet2 r = a;
  r.value() += c;
  return r;
}
Jet2 operator+(double c, const Jet2& a) { return a + c; }
Jet2 operator-(const Jet2& a, double c) { return a + (-c); }
Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }

Jet2 operator*(const Jet2& a, double k) {
  Jet2 r = a;
  r *= k;
  return r;
}
Jet2 operator*(double k, const Jet2& a) { return a * k; }
Jet2 operator/(const Jet2& a, double k) {
  Jet2 r = a;
  r.value() /= k;
  for (int i = 0; i < a.n_in(); ++i) {
    r.d(i) /= k;
    r.dd(i) /= k;
  }
  return r;
}
Jet2 operator/(double c, const Jet2& a) { return Jet2::constant(c, a.n_in()) / a; }

Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.value());
  const double t1 = 1.0 - t * t;
  return a.compose(t, t1, -2.0 * t * t1);
}

Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}

Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value());
  return a.compose(s, std::cos(a.value()), -s);
}

Jet2 cos(const Jet2& a) {
  const double c = std::cos(a.value());
  return a.compose(c, -std::sin(a.value()), -c);
}

Jet2 reciprocal(const Jet2& a) {
  const double r = 1.0 / a.value();
  return a.compose(r, -r * r, 2.0 * r * r * r);
}

}  // namespace pinn
