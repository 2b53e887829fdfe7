#include "pinn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "pinn/batch.hpp"
#include "pinn/io.hpp"
#include "pinn/problems.hpp"
#include "pinn/random.hpp"
#include "pinn/sampling.hpp"
#include "pinn/training.hpp"

namespace pinn {
namespace {

std::vector<double> random_point(Engine& eng, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& v : p) v = lo + (hi - lo) * uniform01(eng);
  return p;
}

TEST(Mlp, InitIsDeterministicInSeed) {
  const auto a = Mlp::init({2, 20, 20, 2}, 42).get_params();
  const auto b = Mlp::init({2, 20, 20, 2}, 42).get_params();
  const auto c = Mlp::init({2, 20, 20, 2}, 43).get_params();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Mlp, ParameterCount) {
  const std::vector<int> dims{2, 20, 20, 20, 2};
  const std::size_t expected = 2 * 20 + 20 + 2 * (20 * 20 + 20) + 20 * 2 + 2;
  EXPECT_EQ(expected, 942u);
  EXPECT_EQ(param_count_for(dims), expected);
  const Mlp net = Mlp::init(dims, 1);
  EXPECT_EQ(net.param_count(), expected);
  EXPECT_EQ(net.get_params().size(), expected);
}

TEST(Mlp, WeightsWithinGlorotBoundAndZeroBiases) {
  const Mlp net = Mlp::init({3, 30, 50, 1}, 7);
  for (const auto& layer : net.layers()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(layer.weight.cwiseAbs().maxCoeff(), 0.5 * bound);
    EXPECT_EQ(layer.bias.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Mlp, RejectsDegenerateShapes) {
  EXPECT_THROW(Mlp::init({2}, 1), std::invalid_argument);
  EXPECT_THROW(Mlp::init({2, 0, 1}, 1), std::invalid_argument);
  Mlp net = Mlp::init({2, 4, 1}, 1);
  EXPECT_THROW(net.set_params(std::vector<double>(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(net.forward(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Mlp, ZeroWeightsPassOnlyTheOutputBias) {
  Mlp net = Mlp::init({2, 20, 20, 2}, 3);
  for (auto& layer : net.layers()) layer.weight.setZero();
  net.layers().back().bias << 0.7, -0.2;
  auto eng = make_engine(3, Stream::kTest);
  for (int k = 0; k < 10; ++k) {
    const auto p = random_point(eng, 2, -5, 5);
    const auto y = net.forward(p);
    EXPECT_EQ(y[0], 0.7);
    EXPECT_EQ(y[1], -0.2);
    for (const auto& j : net.forward_jet(p)) {
      for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(j.d(i), 0.0);
        EXPECT_EQ(j.dd(i), 0.0);
      }
    }
  }
}

TEST(Mlp, SingleNeuronAtOrigin) {
  Mlp net = Mlp::init({1, 1, 1}, 0);
  net.set_params(std::vector<double>{1.0, 0.0, 1.0, 0.0});
  EXPECT_EQ(net.forward(std::vector<double>{0.0})[0], 0.0);
  EXPECT_DOUBLE_EQ(net.forward(std::vector<double>{0.5})[0], std::tanh(0.5));
}

TEST(Mlp, ForwardMatchesJetValueBitExactly) {
  auto eng = make_engine(5, Stream::kTest);
  for (int n_in : {2, 3}) {
    const Mlp net = Mlp::init({n_in, 30, 30, 30, 2}, 5 + n_in);
    for (int k = 0; k < 200; ++k) {
      const auto p = random_point(eng, n_in, -3, 3);
      const auto y = net.forward(p);
      const auto j = net.forward_jet(p);
      for (int o = 0; o < 2; ++o) EXPECT_EQ(y[o], j[o].value());
    }
  }
}

TEST(Mlp, JetChannelsMatchFiniteDifferences) {
  auto eng = make_engine(6, Stream::kTest);
  const Mlp net = Mlp::init({3, 20, 20, 2}, 6);
  for (int k = 0; k < 100; ++k) {
    const auto p = random_point(eng, 3);
    const auto j = net.forward_jet(p);
    for (int o = 0; o < 2; ++o) {
      const testing::ScalarFn f = [&](const std::vector<double>& x) { return net.forward(x)[o]; };
      for (int i = 0; i < 3; ++i) {
        const double d = testing::fd_first5(f, p, i, 1e-3);
        const double dd = testing::fd_second5(f, p, i, 1e-3);
        EXPECT_TRUE(testing::close(j[o].d(i), d, 1e-5, 1e-8)) << j[o].d(i) << " vs " << d;
        EXPECT_TRUE(testing::close(j[o].dd(i), dd, 1e-5, 1e-8)) << j[o].dd(i) << " vs " << dd;
      }
    }
  }
}

TEST(Mlp, InputNormalizationFollowsChainRule) {
  const std::vector<double> lo{-3.0, 0.0}, hi{3.0, 10.0};
  const InputMap map = InputMap::to_unit_box(lo, hi);
  EXPECT_DOUBLE_EQ(map.apply(0, -3.0), -1.0);
  EXPECT_DOUBLE_EQ(map.apply(1, 10.0), 1.0);
  const Mlp normalized = Mlp::init({2, 16, 16, 2}, 8, map);
  const Mlp raw = Mlp::init({2, 16, 16, 2}, 8);
  ASSERT_EQ(normalized.get_params(), raw.get_params());

  auto eng = make_engine(8, Stream::kTest);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x{lo[0] + 6.0 * uniform01(eng), 10.0 * uniform01(eng)};
    std::vector<double> xh{map.apply(0, x[0]), map.apply(1, x[1])};
    const auto a = normalized.forward_jet(x);
    const auto b = raw.forward_jet(xh);
    for (int o = 0; o < 2; ++o) {
      EXPECT_EQ(a[o].value(), b[o].value());
      for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(a[o].d(i), map.scale[i] * b[o].d(i), 1e-14);
        EXPECT_NEAR(a[o].dd(i), map.scale[i] * map.scale[i] * b[o].dd(i), 1e-14);
      }
    }
  }
}

TEST(Mlp, ParamsRoundTrip) {
  Mlp net = Mlp::init({2, 10, 10, 2}, 4);
  auto eng = make_engine(4, Stream::kTest);
  std::vector<double> theta(net.param_count());
  for (auto& v : theta) v = uniform01(eng) - 0.5;
  net.set_params(theta);
  EXPECT_EQ(net.get_params(), theta);

  const std::vector<double> p{0.2, 0.9};
  const auto before = net.forward(p);
  net.set_params(net.get_params());
  EXPECT_EQ(net.forward(p), before);
}

TEST(Mlp, OutputIsAffineInLastLayer) {
  Mlp net = Mlp::init({2, 12, 12, 2}, 12);
  net.layers().back().bias << 0.3, -0.1;
  const std::vector<double> p{0.25, -0.4};
  const auto y = net.forward(p);
  net.layers().back().weight *= 2.0;
  net.layers().back().bias *= 2.0;
  const auto y2 = net.forward(p);
  for (int o = 0; o < 2; ++o) EXPECT_NEAR(y2[o], 2.0 * y[o], 1e-15);
}

TEST(Mlp, PreActivationsStayOutOfSaturationAtInit) {
  for (const char* name : {"ex1", "ex2", "ex3", "ex4", "ex5"}) {
    const ProblemSpec problem = make_problem(name);
    for (int layers : {3, 5, 7}) {
      for (int width : {20, 60}) {
        const Mlp net = make_network(problem, layers, width, 42);
        const SampleSet s = sample_problem(problem, {2000, 1, 1}, 42);
        BatchTrace trace;
        batch_forward(net, s.interior, ChannelPlan::value_only(problem.n_in()), trace);
        for (const auto& pre : trace.pre) {
          const Eigen::Index n = pre.cols();
          for (Eigen::Index r = 0; r < pre.rows(); ++r) {
            const auto big = (pre.row(r).array().abs() >= 10.0).count();
            EXPECT_LE(static_cast<double>(big), 0.01 * static_cast<double>(n)) << name;
          }
        }
      }
    }
  }
}

TEST(Mlp, SweepFamilyShapes) {
  EXPECT_TRUE(Mlp::init({2, 40, 40, 40, 40, 2}, 1).in_sweep_family());
  EXPECT_TRUE(Mlp::init({3, 20, 20, 20, 1}, 1).in_sweep_family());
  EXPECT_FALSE(Mlp::init({2, 40, 40, 2}, 1).in_sweep_family());
  EXPECT_FALSE(Mlp::init({2, 40, 30, 40, 2}, 1).in_sweep_family());
  EXPECT_FALSE(Mlp::init({2, 45, 45, 45, 2}, 1).in_sweep_family());
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const std::vector<double> lo{-1.0, 0.0, 0.0}, hi{1.0, 1.0, 8.0};
  const Mlp net = Mlp::init({3, 30, 30, 30, 2}, 99, InputMap::to_unit_box(lo, hi));
  const auto bytes = serialize_checkpoint(net);
  const Mlp back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.layer_dims(), net.layer_dims());
  EXPECT_EQ(back.seed(), net.seed());
  EXPECT_EQ(back.input_map(), net.input_map());
  EXPECT_EQ(back.get_params(), net.get_params());
  EXPECT_EQ(serialize_checkpoint(back), bytes);

  const auto path = std::filesystem::temp_directory_path() / "pinn_checkpoint_test.bin";
  save_checkpoint(net, path);
  EXPECT_EQ(load_checkpoint(path).get_params(), net.get_params());
  std::filesystem::remove(path);
}

TEST(Checkpoint, LayoutIsLittleEndian) {
  Mlp net = Mlp::init({1, 1, 1}, 0x0102030405060708ULL);
  net.set_params(std::vector<double>{1.0, 0.0, -2.0, 0.5});
  const auto b = serialize_checkpoint(net);
  ASSERT_EQ(std::string(b.begin(), b.begin() + 8), "BPINNCK1");
  const std::vector<std::uint8_t> n_dims{3, 0, 0, 0};
  EXPECT_EQ(std::vector<std::uint8_t>(b.begin() + 8, b.begin() + 12), n_dims);
  // seed after three u32 widths
  EXPECT_EQ(b[24], 0x08);
  EXPECT_EQ(b[31], 0x01);
  // 8 magic + 4 + 12 dims + 8 seed + 8 scale + 8 shift + 8 count + 4 params
  EXPECT_EQ(b.size(), 8u + 4 + 12 + 8 + 8 + 8 + 8 + 4 * 8);
}

TEST(Checkpoint, CorruptInputIsRejected) {
  const auto good = serialize_checkpoint(Mlp::init({2, 5, 2}, 1));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), std::runtime_error);
  auto truncated = good;
  truncated.resize(good.size() - 3);
  EXPECT_THROW(deserialize_checkpoint(truncated), std::runtime_error);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_checkpoint(trailing), std::runtime_error);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/ck.bin"), std::runtime_error);
}

}  // namespace
}  // namespace pinn
