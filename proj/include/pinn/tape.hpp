#ifndef PINN_TAPE_HPP_
#define PINN_TAPE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pinn/jet.hpp"

namespace pinn {

class GradTape;

// Handle to a node on a GradTape. Cheap to copy; valid as long as the tape.
class Var {
 public:
  Var() = default;

  const Jet2& jet() const;
  double value() const { return jet().value(); }
  std::size_t index() const { return index_; }
  GradTape* tape() const { return tape_; }

 private:
  friend class GradTape;
  Var(GradTape* tape, std::size_t index) : tape_(tape), index_(index) {}

  GradTape* tape_ = nullptr;
  std::size_t index_ = 0;
};

// Reverse-mode record whose primal values are Jet2. The adjoint of every node
// is itself jet-shaped, so a loss built from input derivatives (u_x, u_xx, ...)
// of a network differentiates exactly with respect to the network parameters.
//
// Nodes are either "scalar" (independent of the jet inputs: parameters,
// constants, and derivative channels pulled out of a jet) or input-dependent.
// Only a scalar node can be finalized as the loss.
class GradTape {
 public:
  explicit GradTape(int n_in);

  int n_in() const { return n_in_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t parameter_count() const { return n_params_; }

  // Registers a trainable parameter. Parameters are numbered in call order.
  Var parameter(double value);
  Var constant(double value);
  Var input(double x, int i);

  // Channel extraction: turns one channel of a jet into a scalar node.
  Var value_of(Var a);
  Var d_of(Var a, int i);
  Var dd_of(Var a, int i);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double k);
  Var shift(Var a, double c);
  Var tanh(Var a);

  // Marks the loss node. Throws if the node depends on the jet inputs.
  void finalize(Var loss);
  bool finalized() const { return loss_.has_value(); }

  // d(loss)/d(parameter) for every registered parameter, in registration
  // order. Throws std::logic_error if the tape has not been finalized.
  std::vector<double> param_gradient() const;

 private:
  friend class Var;

  enum class Op : std::uint8_t {
    kParameter,
    kConstant,
    kInput,
    kValueOf,
    kDOf,
    kDDOf,
    kAdd,
    kSub,
    kMul,
    kScale,
    kShift,
    kTanh,
  };

  struct Node {
    Op op = Op::kConstant;
    bool scalar = false;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    int channel = 0;
    double k = 0.0;   // scale factor, or f''' for tanh
    double f1 = 0.0;  // f'(a) for tanh
    double f2 = 0.0;  // f''(a) for tanh
    std::size_t param = 0;
    Jet2 jet{};
  };

  Var push(Node node);
  void check_owner(Var v) const;

  int n_in_;
  std::size_t n_params_ = 0;
  std::vector<Node> nodes_;
  std::optional<std::size_t> loss_;
};

std::vector<double> param_gradient(const GradTape& tape);

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double c);
Var operator+(double c, Var a);
Var operator-(Var a, double c);
Var operator-(double c, Var a);
Var operator*(Var a, double k);
Var operator*(double k, Var a);
Var tanh(Var a);

}  // namespace pinn

#endif  // PINN_TAPE_HPP_
