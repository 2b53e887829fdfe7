#include "pinn/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pinn/random.hpp"

namespace pinn {
namespace {

// Keeps c inside [k/n, (k+1)/n) after rounding.
double clamp_to_stratum(double c, std::uint64_t k, int n) {
  while (c >= 1.0 || std::floor(c * n) > static_cast<double>(k)) c = std::nextafter(c, 0.0);
  while (std::floor(c * n) < static_cast<double>(k)) c = std::nextafter(c, 1.0);
  return c;
}

Eigen::MatrixXd lhs_from(Engine& eng, int n, int dims) {
  if (n < 1) throw std::invalid_argument("lhs: need at least one sample");
  if (dims < 1) throw std::invalid_argument("lhs: need at least one dimension");
  Eigen::MatrixXd pts(dims, n);
  std::vector<std::uint64_t> perm(static_cast<std::size_t>(n));
  for (int d = 0; d < dims; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[uniform_index(eng, i)]);
    }
    for (int k = 0; k < n; ++k) {
      const double c = (static_cast<double>(perm[k]) + uniform_open(eng)) / n;
      pts(d, k) = clamp_to_stratum(c, perm[k], n);
    }
  }
  return pts;
}

// Maps p in (0,1) into the open interval (lo, hi).
double scale_open(double p, double lo, double hi) {
  double v = lo + p * (hi - lo);
  if (v <= lo) v = std::nextafter(lo, hi);
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

}  // namespace

SampleCounts SampleCounts::defaults_for(const ProblemSpec& problem) {
  SampleCounts c;
  c.boundary = 400 * (problem.n_space == 1 ? 1 : 4);
  return c;
}

Eigen::MatrixXd lhs(int n, int dims, std::uint64_t seed) {
  Engine eng = make_engine(seed, Stream::kTest);
  return lhs_from(eng, n, dims);
}

SampleSet sample_problem(const ProblemSpec& problem, const SampleCounts& counts,
                         std::uint64_t seed, std::uint64_t epoch_tag) {
  if (counts.interior < 1 || counts.initial < 1 || counts.boundary < 1) {
    throw std::invalid_argument("sample counts must be at least 1");
  }
  const int ns = problem.n_space;
  for (const auto& iv : problem.space_box) {
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("degenerate spatial interval");
  }
  if (!(problem.t_max > 0.0)) throw std::invalid_argument("time horizon must be positive");

  SampleSet s;
  s.seed = seed;
  s.epoch_tag = epoch_tag;

  {
    Engine eng = make_engine(seed, Stream::kInterior, {epoch_tag});
    const Eigen::MatrixXd u = lhs_from(eng, counts.interior, ns + 1);
    s.interior.resize(ns + 1, counts.interior);
    for (int k = 0; k < counts.interior; ++k) {
      for (int d = 0; d < ns; ++d) {
        s.interior(d, k) = scale_open(u(d, k), problem.space_box[d].lo, problem.space_box[d].hi);
      }
      s.interior(ns, k) = scale_open(u(ns, k), 0.0, problem.t_max);
    }
  }

  {
    Engine eng = make_engine(seed, Stream::kInitial, {epoch_tag});
    const Eigen::MatrixXd u = lhs_from(eng, counts.initial, ns);
    s.initial.setZero(ns + 1, counts.initial);
    for (int k = 0; k < counts.initial; ++k) {
      for (int d = 0; d < ns; ++d) {
        s.initial(d, k) = scale_open(u(d, k), problem.space_box[d].lo, problem.space_box[d].hi);
      }
    }
  }

  {
    const int faces = 2 * ns;
    s.boundary.resize(ns + 1, counts.boundary);
    int col = 0;
    for (int f = 0; f < faces; ++f) {
      const int m = counts.boundary / faces + (f < counts.boundary % faces ? 1 : 0);
      if (m == 0) continue;
      const int fixed_dim = f / 2;
      const double fixed_value =
          (f % 2 == 0) ? problem.space_box[fixed_dim].lo : problem.space_box[fixed_dim].hi;
      Engine eng = make_engine(seed, Stream::kBoundary, {epoch_tag, static_cast<std::uint64_t>(f)});
      // Free coordinates: the other spatial dims, then t.
      const Eigen::MatrixXd u = lhs_from(eng, m, ns);
      for (int k = 0; k < m; ++k, ++col) {
        int r = 0;
        for (int d = 0; d < ns; ++d) {
          if (d == fixed_dim) {
            s.boundary(d, col) = fixed_value;
          } else {
            s.boundary(d, col) = scale_open(u(r++, k), problem.space_box[d].lo, problem.space_box[d].hi);
          }
        }
        s.boundary(ns, col) = scale_open(u(r, k), 0.0, problem.t_max);
      }
    }
  }
  return s;
}

}  // namespace pinn
