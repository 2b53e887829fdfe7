#include "pinn/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinn {
namespace {

// Jet-shaped adjoint.
struct Adjoint {
  double v = 0.0;
  std::array<double, Jet2::kMaxInputs> d{};
  std::array<double, Jet2::kMaxInputs> dd{};
};

void accumulate(Adjoint& dst, const Adjoint& src, int n, double k = 1.0) {
  dst.v += k * src.v;
  for (int i = 0; i < n; ++i) {
    dst.d[i] += k * src.d[i];
    dst.dd[i] += k * src.dd[i];
  }
}

}  // namespace

const Jet2& Var::jet() const {
  if (tape_ == nullptr) throw std::logic_error("Var is not attached to a tape");
  return tape_->nodes_[index_].jet;
}

GradTape::GradTape(int n_in) : n_in_(n_in) {
  // Validates n_in.
  (void)Jet2::constant(0.0, n_in);
}

Var GradTape::push(Node node) {
  nodes_.push_back(node);
  return Var(this, nodes_.size() - 1);
}

void GradTape::check_owner(Var v) const {
  if (v.tape_ != this || v.index_ >= nodes_.size()) {
    throw std::invalid_argument("Var does not belong to this tape");
  }
}

Var GradTape::parameter(double value) {
  Node n{.op = Op::kParameter, .scalar = true};
  n.param = n_params_++;
  n.jet = Jet2::constant(value, n_in_);
  return push(n);
}

Var GradTape::constant(double value) {
  Node n{.op = Op::kConstant, .scalar = true};
  n.jet = Jet2::constant(value, n_in_);
  return push(n);
}

Var GradTape::input(double x, int i) {
  Node n{.op = Op::kInput, .scalar = false};
  n.jet = Jet2::variable(x, i, n_in_);
  return push(n);
}

Var GradTape::value_of(Var a) {
  check_owner(a);
  Node n{.op = Op::kValueOf, .scalar = true};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.jet = Jet2::constant(nodes_[a.index_].jet.value(), n_in_);
  return push(n);
}

Var GradTape::d_of(Var a, int i) {
  check_owner(a);
  if (i < 0 || i >= n_in_) throw std::out_of_range("derivative channel out of range");
  Node n{.op = Op::kDOf, .scalar = true};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.channel = i;
  n.jet = Jet2::constant(nodes_[a.index_].jet.d(i), n_in_);
  return push(n);
}

Var GradTape::dd_of(Var a, int i) {
  check_owner(a);
  if (i < 0 || i >= n_in_) throw std::out_of_range("derivative channel out of range");
  Node n{.op = Op::kDDOf, .scalar = true};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.channel = i;
  n.jet = Jet2::constant(nodes_[a.index_].jet.dd(i), n_in_);
  return push(n);
}

Var GradTape::add(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Node& na = nodes_[a.index_];
  const Node& nb = nodes_[b.index_];
  Node n{.op = Op::kAdd, .scalar = na.scalar && nb.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.b = static_cast<std::uint32_t>(b.index_);
  n.jet = na.jet + nb.jet;
  return push(n);
}

Var GradTape::sub(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Node& na = nodes_[a.index_];
  const Node& nb = nodes_[b.index_];
  Node n{.op = Op::kSub, .scalar = na.scalar && nb.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.b = static_cast<std::uint32_t>(b.index_);
  n.jet = na.jet - nb.jet;
  return push(n);
}

Var GradTape::mul(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Node& na = nodes_[a.index_];
  const Node& nb = nodes_[b.index_];
  Node n{.op = Op::kMul, .scalar = na.scalar && nb.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.b = static_cast<std::uint32_t>(b.index_);
  n.jet = na.jet * nb.jet;
  return push(n);
}

Var GradTape::scale(Var a, double k) {
  check_owner(a);
  const Node& na = nodes_[a.index_];
  Node n{.op = Op::kScale, .scalar = na.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.k = k;
  n.jet = na.jet * k;
  return push(n);
}

Var GradTape::shift(Var a, double c) {
  check_owner(a);
  const Node& na = nodes_[a.index_];
  Node n{.op = Op::kShift, .scalar = na.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.jet = na.jet + c;
  return push(n);
}

Var GradTape::tanh(Var a) {
  check_owner(a);
  const Node& na = nodes_[a.index_];
  const double t = std::tanh(na.jet.value());
  const double t1 = 1.0 - t * t;
  const double t2 = -2.0 * t * t1;
  Node n{.op = Op::kTanh, .scalar = na.scalar};
  n.a = static_cast<std::uint32_t>(a.index_);
  n.f1 = t1;
  n.f2 = t2;
  n.k = -2.0 * t1 * t1 - 2.0 * t * t2;
  n.jet = na.jet.compose(t, t1, t2);
  return push(n);
}

void GradTape::finalize(Var loss) {
  check_owner(loss);
  if (!nodes_[loss.index_].scalar) {
    throw std::invalid_argument("loss node depends on jet inputs; extract a channel first");
  }
  loss_ = loss.index_;
}

std::vector<double> GradTape::param_gradient() const {
  if (!loss_) throw std::logic_error("tape has not been finalized to a scalar loss");

  const int n = n_in_;
  std::vector<Adjoint> adj(*loss_ + 1);
  adj[*loss_].v = 1.0;
  std::vector<double> grad(n_params_, 0.0);

  for (std::size_t idx = *loss_ + 1; idx-- > 0;) {
    const Node& node = nodes_[idx];
    const Adjoint& c = adj[idx];
    switch (node.op) {
      case Op::kParameter:
        grad[node.param] += c.v;
        break;
      case Op::kConstant:
      case Op::kInput:
        break;
      case Op::kValueOf:
        adj[node.a].v += c.v;
        break;
      case Op::kDOf:
        adj[node.a].d[node.channel] += c.v;
        break;
      case Op::kDDOf:
        adj[node.a].dd[node.channel] += c.v;
        break;
      case Op::kAdd:
        accumulate(adj[node.a], c, n);
        accumulate(adj[node.b], c, n);
        break;
      case Op::kSub:
        accumulate(adj[node.a], c, n);
        accumulate(adj[node.b], c, n, -1.0);
        break;
      case Op::kScale:
        accumulate(adj[node.a], c, n, node.k);
        break;
      case Op::kShift:
        accumulate(adj[node.a], c, n);
        break;
      case Op::kMul: {
        // r = a b; r_i = a_i b + a b_i; r_ii = a_ii b + 2 a_i b_i + a b_ii.
        const Jet2& a = nodes_[node.a].jet;
        const Jet2& b = nodes_[node.b].jet;
        Adjoint ga, gb;
        ga.v = c.v * b.value();
        gb.v = c.v * a.value();
        for (int i = 0; i < n; ++i) {
          ga.v += c.d[i] * b.d(i) + c.dd[i] * b.dd(i);
          gb.v += c.d[i] * a.d(i) + c.dd[i] * a.dd(i);
          ga.d[i] = c.d[i] * b.value() + 2.0 * c.dd[i] * b.d(i);
          gb.d[i] = c.d[i] * a.value() + 2.0 * c.dd[i] * a.d(i);
          ga.dd[i] = c.dd[i] * b.value();
          gb.dd[i] = c.dd[i] * a.value();
        }
        accumulate(adj[node.a], ga, n);
        accumulate(adj[node.b], gb, n);
        break;
      }
      case Op::kTanh: {
        // r = f(a); r_i = f' a_i; r_ii = f'' a_i^2 + f' a_ii.
        const Jet2& a = nodes_[node.a].jet;
        const double f1 = node.f1, f2 = node.f2, f3 = node.k;
        Adjoint ga;
        ga.v = c.v * f1;
        for (int i = 0; i < n; ++i) {
          ga.v += c.d[i] * f2 * a.d(i) + c.dd[i] * (f3 * a.d(i) * a.d(i) + f2 * a.dd(i));
          ga.d[i] = c.d[i] * f1 + 2.0 * c.dd[i] * f2 * a.d(i);
          ga.dd[i] = c.dd[i] * f1;
        }
        accumulate(adj[node.a], ga, n);
        break;
      }
    }
  }
  return grad;
}

std::vector<double> param_gradient(const GradTape& tape) { return tape.param_gradient(); }

namespace {
GradTape& tape_of(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw std::invalid_argument("operands belong to different tapes");
  }
  return *a.tape();
}
GradTape& tape_of(Var a) {
  if (a.tape() == nullptr) throw std::invalid_argument("Var is not attached to a tape");
  return *a.tape();
}
}  // namespace

Var operator+(Var a, Var b) { return tape_of(a, b).add(a, b); }
Var operator-(Var a, Var b) { return tape_of(a, b).sub(a, b); }
Var operator*(Var a, Var b) { return tape_of(a, b).mul(a, b); }
Var operator-(Var a) { return tape_of(a).scale(a, -1.0); }
Var operator+(Var a, double c) { return tape_of(a).shift(a, c); }
Var operator+(double c, Var a) { return tape_of(a).shift(a, c); }
Var operator-(Var a, double c) { return tape_of(a).shift(a, -c); }
Var operator-(double c, Var a) { return tape_of(a).shift(tape_of(a).scale(a, -1.0), c); }
Var operator*(Var a, double k) { return tape_of(a).scale(a, k); }
Var operator*(double k, Var a) { return tape_of(a).scale(a, k); }
Var tanh(Var a) { return tape_of(a).tanh(a); }

}  // namespace pinn
