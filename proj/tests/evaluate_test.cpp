#include "pinn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "pinn/random.hpp"

namespace pinn {
namespace {

TEST(Norms, ZeroError) {
  const NormPair n = norms_from_errors(std::vector<double>(11, 0.0));
  EXPECT_EQ(n.linf, 0.0);
  EXPECT_EQ(n.l2, 0.0);
}

TEST(Norms, TwoPointExample) {
  const NormPair n = norms_from_errors(std::vector<double>{3.0, 4.0});
  EXPECT_EQ(n.linf, 4.0);
  EXPECT_DOUBLE_EQ(n.l2, std::sqrt(25.0 / 2.0));
  EXPECT_NEAR(n.l2, 3.53553, 1e-5);
  EXPECT_DOUBLE_EQ(norms_from_errors(std::vector<double>{3.0, 4.0}, L2Norm::kAbsolute).l2, 5.0);
  EXPECT_DOUBLE_EQ(norms_from_errors(std::vector<double>{3.0, 4.0}, L2Norm::kRelative, std::vector<double>{6.0, 8.0}).l2,
                   0.5);
  EXPECT_THROW(norms_from_errors(std::vector<double>{}), std::invalid_argument);
}

TEST(Norms, RmsNeverExceedsLinfAndIgnoresOrder) {
  auto eng = make_engine(3, Stream::kTest);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> e(1 + uniform_index(eng, 300));
    for (auto& v : e) v = std::ldexp(uniform01(eng) - 0.5, -static_cast<int>(uniform_index(eng, 30)));
    const NormPair a = norms_from_errors(e);
    EXPECT_LE(a.l2, a.linf);
    std::reverse(e.begin(), e.end());
    std::rotate(e.begin(), e.begin() + static_cast<long>(e.size() / 3), e.end());
    const NormPair b = norms_from_errors(e);
    EXPECT_EQ(a.linf, b.linf);
    EXPECT_NEAR(a.l2, b.l2, 1e-15 * a.l2);
  }
}

TEST(Norms, Names) {
  for (auto n : {L2Norm::kRms, L2Norm::kAbsolute, L2Norm::kRelative}) EXPECT_EQ(l2_norm_from_name(l2_norm_name(n)), n);
  EXPECT_THROW(l2_norm_from_name("euclid"), std::invalid_argument);
}

TEST(Grid, EndpointsAndShape) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const auto g = evaluation_grid(ex1, 0.5, 1001);
  ASSERT_EQ(g.size(), 1001u);
  EXPECT_EQ(g.front()[0], ex1.space_box[0].lo);
  EXPECT_EQ(g.back()[0], ex1.space_box[0].hi);
  for (const auto& p : g) EXPECT_EQ(p[1], 0.5);
  const ProblemSpec ex5 = make_problem(ProblemId::kEx5);
  const auto g2 = evaluation_grid(ex5, 8.0, 11);
  ASSERT_EQ(g2.size(), 121u);
  EXPECT_EQ(g2.back()[0], 1.0);
  EXPECT_EQ(g2.back()[1], 1.0);
  EXPECT_THROW(evaluation_grid(ex5, 8.5, 11), std::invalid_argument);
  EXPECT_THROW(evaluation_grid(ex5, -0.1, 11), std::invalid_argument);
  EXPECT_THROW(evaluation_grid(ex5, 1.0, 1), std::invalid_argument);
}

TEST(Report, Ex1Structure) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const Mlp net = make_network(ex1, 3, 20, 1);
  const std::vector<double> times{0.5, 1.0, 5.0, 10.0};
  const ErrorReport r = report(net, ex1, times, 201);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    ASSERT_EQ(row.size(), 2u);
    for (const auto& n : row) EXPECT_LE(n.l2, n.linf);
  }
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,u_Linf,u_L2,v_Linf,v_L2");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

  const ErrorReport back = parse_report_csv(csv);
  EXPECT_EQ(back.variables, r.variables);
  EXPECT_EQ(back.times, r.times);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(back.rows[i][k].linf, r.rows[i][k].linf, 5e-5 * r.rows[i][k].linf);
      EXPECT_NEAR(back.rows[i][k].l2, r.rows[i][k].l2, 5e-5 * r.rows[i][k].l2);
    }
  }
  EXPECT_EQ(report_csv(back), csv);

  const auto j = report_json(r);
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["rows"][1]["v"]["Linf"].get<double>(), r.rows[1][1].linf);
  EXPECT_THROW(report(net, ex1, std::vector<double>{}, 201), std::invalid_argument);
}

TEST(Report, SingleOutputColumns) {
  const ProblemSpec ex4 = make_problem(ProblemId::kEx4);
  const ErrorReport r = report(make_network(ex4, 3, 20, 1), ex4, std::vector<double>{0.0, 1.0}, 11);
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,u_Linf,u_L2");
}

double lipschitz_bound(const Mlp& net) {
  double lip = 1.0;
  for (const auto& layer : net.layers()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(layer.weight);
    lip *= svd.singularValues()(0);
  }
  double s = 0.0;
  for (double v : net.input_map().scale) s = std::max(s, v);
  return lip * s;
}

TEST(Report, GridRefinementIsSmooth) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const Mlp net = make_network(ex1, 3, 20, 4);
  const int n = 201;
  const double h = (ex1.space_box[0].hi - ex1.space_box[0].lo) / (n - 1);
  const double coarse = error_norms(net, ex1, 1.0, n)[0].linf;
  const double fine = error_norms(net, ex1, 1.0, 2 * n - 1)[0].linf;
  // |u_exact_x| <= e^{-t}
  const double bound = (lipschitz_bound(net) + std::exp(-1.0)) * h;
  if (std::abs(fine - coarse) > bound) {
    std::cerr << "warning: grid refinement moved Linf by " << std::abs(fine - coarse) << " > " << bound << '\n';
  }
  EXPECT_GE(fine, coarse);
}

TEST(Sweep, ValidationTime) {
  EXPECT_EQ(validation_time_for(make_problem(ProblemId::kEx1)), 1.0);
  ProblemSpec p = make_problem(ProblemId::kEx4);
  p.t_max = 0.5;
  EXPECT_EQ(validation_time_for(p), 0.25);
}

TEST(Sweep, SelectBest) {
  std::vector<SweepCell> cells(4);
  cells[0] = {3, 20, true, "", {0.2, 0.1}, 0.0};
  cells[1] = {4, 20, true, "", {0.1, 0.09}, 0.0};
  cells[2] = {5, 20, true, "", {0.1, 0.05}, 0.0};
  cells[3] = {6, 20, false, "boom", {0.0, 0.0}, 0.0};
  EXPECT_EQ(select_best(cells), 2u);
  for (auto& c : cells) c.ok = false;
  EXPECT_FALSE(select_best(cells).has_value());
}

TrainConfig quick(int epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.counts = {200, 40, 40};
  c.layers = 3;
  c.width = 20;
  return c;
}

TEST(Sweep, SingleCell) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const std::vector<int> L{4}, H{30};
  const SweepResult r = sweep(ex1, L, H, quick(3), 51);
  ASSERT_EQ(r.cells.size(), 1u);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(r.cells[*r.best].layers, 4);
  EXPECT_EQ(r.cells[*r.best].width, 30);
}

TEST(Sweep, TrainedConfigBeatsOneEpoch) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const std::vector<TrainConfig> configs{quick(1), quick(400)};
  const SweepResult r = run_sweep_cells(ex1, configs, 101);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(*r.best, 1u);
}

TEST(Sweep, FullGridStructureAndFailures) {
  const ProblemSpec ex1 = make_problem(ProblemId::kEx1);
  const std::vector<int> L{3, 4, 5, 6, 7}, H{20, 30, 40, 50, 60};
  TrainConfig base = quick(2);
  base.counts = {64, 16, 16};
  const SweepResult r = sweep(ex1, L, H, base, 21);
  ASSERT_EQ(r.cells.size(), 25u);
  const std::string csv = sweep_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layers,width,status,linf,l2,final_loss,selected");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 26);
  EXPECT_EQ(r.configs[7].layers, 4);
  EXPECT_EQ(r.configs[7].width, 40);

  std::vector<TrainConfig> configs{quick(2), quick(5)};
  configs[0].learning_rate = 1e300;
  const SweepResult f = run_sweep_cells(ex1, configs, 21);
  EXPECT_FALSE(f.cells[0].ok);
  EXPECT_FALSE(f.cells[0].error.empty());
  EXPECT_TRUE(f.cells[1].ok);
  EXPECT_EQ(f.best, 1u);
}

}  // namespace
}  // namespace pinn
