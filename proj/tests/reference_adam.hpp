#ifndef PINN_TESTS_REFERENCE_ADAM_HPP_
#define PINN_TESTS_REFERENCE_ADAM_HPP_

#include <cmath>

namespace pinn::testing {

// One-parameter Adam written out longhand, with the bias corrections as
// running products instead of powers.
struct ScalarAdam {
  double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0, b1t = 1.0, b2t = 1.0;

  double step(double theta, double g) {
    b1t *= b1;
    b2t *= b2;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mh = m / (1.0 - b1t);
    const double vh = v / (1.0 - b2t);
    return theta - lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace pinn::testing

#endif  // PINN_TESTS_REFERENCE_ADAM_HPP_
