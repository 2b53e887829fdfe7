#ifndef PINN_SAMPLING_HPP_
#define PINN_SAMPLING_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "pinn/problems.hpp"

namespace pinn {

// Point sets store one point per column: rows are (x, t) or (x, y, t).
using PointMatrix = Eigen::MatrixXd;

struct SampleCounts {
  int interior = 10000;  // N_r
  int initial = 400;     // N_0
  int boundary = 400;    // N_b

  // N_b = 400 in 1D (200 per end) and 1600 in 2D (400 per edge).
  static SampleCounts defaults_for(const ProblemSpec& problem);
  bool operator==(const SampleCounts&) const = default;
};

struct SampleSet {
  PointMatrix interior;
  PointMatrix initial;
  PointMatrix boundary;
  std::uint64_t seed = 0;
  std::uint64_t epoch_tag = 0;
};

// Latin hypercube in [0,1)^dims, one point per column. Along every dimension
// each of the n strata [k/n, (k+1)/n) holds exactly one point.
Eigen::MatrixXd lhs(int n, int dims, std::uint64_t seed);

// Interior points in space_box x (0, t_max), initial points on t = 0 and
// boundary points split evenly over the 2 * n_space faces x (0, t_max].
// The stream depends only on (seed, epoch_tag).
SampleSet sample_problem(const ProblemSpec& problem, const SampleCounts& counts,
                         std::uint64_t seed, std::uint64_t epoch_tag = 0);

}  // namespace pinn

#endif  // PINN_SAMPLING_HPP_
