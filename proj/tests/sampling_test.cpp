#include "pinn/sampling.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "gtest/gtest.h"
#include "pinn/random.hpp"

namespace pinn {
namespace {

void expect_stratified(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.cols());
  for (Eigen::Index d = 0; d < m.rows(); ++d) {
    std::vector<int> hits(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) {
      const double v = m(d, k);
      ASSERT_GE(v, 0.0);
      ASSERT_LT(v, 1.0);
      const int s = static_cast<int>(std::floor(v * n));
      ASSERT_GE(s, 0);
      ASSERT_LT(s, n);
      // the stratum is [s/n, (s+1)/n) in exact arithmetic
      EXPECT_GE(v, static_cast<double>(s) / n);
      ++hits[static_cast<std::size_t>(s)];
    }
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Lhs, SinglePoint) {
  const auto m = lhs(1, 2, 5);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 1);
  EXPECT_GE(m.minCoeff(), 0.0);
  EXPECT_LT(m.maxCoeff(), 1.0);
}

TEST(Lhs, FourStrataInOneDimension) {
  const auto m = lhs(4, 1, 9);
  std::set<int> strata;
  for (int k = 0; k < 4; ++k) strata.insert(static_cast<int>(m(0, k) * 4));
  EXPECT_EQ(strata, (std::set<int>{0, 1, 2, 3}));
}

TEST(Lhs, Deterministic) {
  EXPECT_EQ(lhs(50, 3, 77), lhs(50, 3, 77));
  EXPECT_NE(lhs(50, 3, 77), lhs(50, 3, 78));
}

TEST(Lhs, StratifiedProperty) {
  auto eng = make_engine(1, Stream::kTest);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(uniform_index(eng, 3000));
    const int dims = 1 + static_cast<int>(uniform_index(eng, 3));
    expect_stratified(lhs(n, dims, eng()));
  }
  expect_stratified(lhs(1 << 16, 2, 3));
}

TEST(Lhs, RejectsBadArguments) {
  EXPECT_THROW(lhs(0, 2, 1), std::invalid_argument);
  EXPECT_THROW(lhs(5, 0, 1), std::invalid_argument);
}

TEST(Sampling, Ex1Construction) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const double pi = std::numbers::pi;
  const SampleSet s = sample_problem(ex1, {100, 20, 20}, 7);
  ASSERT_EQ(s.interior.cols(), 100);
  ASSERT_EQ(s.initial.cols(), 20);
  ASSERT_EQ(s.boundary.cols(), 20);
  for (Eigen::Index k = 0; k < 100; ++k) {
    EXPECT_GT(s.interior(0, k), -pi);
    EXPECT_LT(s.interior(0, k), pi);
    EXPECT_GT(s.interior(1, k), 0.0);
    EXPECT_LT(s.interior(1, k), 10.0);
  }
  for (Eigen::Index k = 0; k < 20; ++k) {
    EXPECT_EQ(s.initial(1, k), 0.0);
    EXPECT_GE(s.initial(0, k), -pi);
    EXPECT_LE(s.initial(0, k), pi);
  }
  int left = 0, right = 0;
  for (Eigen::Index k = 0; k < 20; ++k) {
    left += s.boundary(0, k) == -pi;
    right += s.boundary(0, k) == pi;
    EXPECT_GT(s.boundary(1, k), 0.0);
    EXPECT_LE(s.boundary(1, k), 10.0);
  }
  EXPECT_EQ(left, 10);
  EXPECT_EQ(right, 10);
}

TEST(Sampling, DefaultCounts) {
  EXPECT_EQ(SampleCounts::defaults_for(make_problem(ProblemId::kEx1)), (SampleCounts{10000, 400, 400}));
  EXPECT_EQ(SampleCounts::defaults_for(make_problem(ProblemId::kEx5)), (SampleCounts{10000, 400, 1600}));
}

bool on_face(const ProblemSpec& p, const Eigen::VectorXd& x) {
  for (int d = 0; d < p.n_space; ++d) {
    if (x(d) == p.space_box[d].lo || x(d) == p.space_box[d].hi) return true;
  }
  return false;
}

void expect_membership(const ProblemSpec& p, const SampleSet& s) {
  const int n = p.n_in();
  ASSERT_EQ(s.interior.rows(), n);
  for (Eigen::Index k = 0; k < s.interior.cols(); ++k) {
    for (int d = 0; d < p.n_space; ++d) {
      EXPECT_GT(s.interior(d, k), p.space_box[d].lo);
      EXPECT_LT(s.interior(d, k), p.space_box[d].hi);
    }
    EXPECT_GT(s.interior(n - 1, k), 0.0);
    EXPECT_LT(s.interior(n - 1, k), p.t_max);
  }
  for (Eigen::Index k = 0; k < s.initial.cols(); ++k) {
    EXPECT_EQ(s.initial(n - 1, k), 0.0);
    for (int d = 0; d < p.n_space; ++d) {
      EXPECT_GE(s.initial(d, k), p.space_box[d].lo);
      EXPECT_LE(s.initial(d, k), p.space_box[d].hi);
    }
  }
  for (Eigen::Index k = 0; k < s.boundary.cols(); ++k) {
    const Eigen::VectorXd x = s.boundary.col(k);
    EXPECT_TRUE(on_face(p, x));
    EXPECT_TRUE(p.on_spatial_boundary(std::vector<double>(x.data(), x.data() + n)));
    EXPECT_GT(x(n - 1), 0.0);
    EXPECT_LE(x(n - 1), p.t_max);
  }
}

TEST(Sampling, MembershipProperty) {
  auto eng = make_engine(2, Stream::kTest);
  const std::vector<std::string> names = registered_problem_names();
  for (int rep = 0; rep < 40; ++rep) {
    const ProblemSpec p = make_problem(names[uniform_index(eng, names.size())]);
    const SampleCounts c{1 + static_cast<int>(uniform_index(eng, 500)), 1 + static_cast<int>(uniform_index(eng, 100)),
                         1 + static_cast<int>(uniform_index(eng, 100))};
    const SampleSet s = sample_problem(p, c, eng(), uniform_index(eng, 5));
    EXPECT_EQ(s.interior.cols(), c.interior);
    EXPECT_EQ(s.initial.cols(), c.initial);
    EXPECT_EQ(s.boundary.cols(), c.boundary);
    expect_membership(p, s);
  }
}

TEST(Sampling, Ex4BoundaryFaces) {
  const ProblemSpec ex4 = make_problem(ProblemId::kEx4);
  const SampleSet s = sample_problem(ex4, {10, 10, 1600}, 3);
  int per_face[4] = {0, 0, 0, 0};
  for (Eigen::Index k = 0; k < s.boundary.cols(); ++k) {
    const double x = s.boundary(0, k), y = s.boundary(1, k);
    EXPECT_TRUE(x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0);
    per_face[0] += x == 0.0;
    per_face[1] += x == 1.0;
    per_face[2] += y == 0.0;
    per_face[3] += y == 1.0;
  }
  for (int f : per_face) EXPECT_EQ(f, 400);
}

TEST(Sampling, EpochTagSelectsReproducibleStreams) {
  const ProblemSpec ex3 = make_problem(ProblemId::kEx3);
  const SampleCounts c{200, 40, 40};
  const SampleSet a0 = sample_problem(ex3, c, 11, 0);
  const SampleSet a1 = sample_problem(ex3, c, 11, 1);
  const SampleSet b0 = sample_problem(ex3, c, 11, 0);
  const SampleSet b1 = sample_problem(ex3, c, 11, 1);
  EXPECT_EQ(a0.interior, b0.interior);
  EXPECT_EQ(a0.initial, b0.initial);
  EXPECT_EQ(a0.boundary, b0.boundary);
  EXPECT_EQ(a1.interior, b1.interior);
  EXPECT_EQ(a1.boundary, b1.boundary);
  int shared = 0;
  for (Eigen::Index k = 0; k < a0.interior.cols(); ++k) {
    for (Eigen::Index j = 0; j < a1.interior.cols(); ++j) shared += a0.interior.col(k) == a1.interior.col(j);
  }
  EXPECT_EQ(shared, 0);
}

TEST(Sampling, RejectsBadCounts) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  EXPECT_THROW(sample_problem(ex1, {0, 1, 1}, 1), std::invalid_argument);
  EXPECT_THROW(sample_problem(ex1, {1, 1, 0}, 1), std::invalid_argument);
}

}  // namespace
}  // namespace pinn
