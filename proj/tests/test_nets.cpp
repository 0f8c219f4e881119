#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "proxeig/error.hpp"
#include "proxeig/nets.hpp"
#include "proxeig/operator.hpp"
#include "proxeig/power.hpp"
#include "test_util.hpp"

using namespace proxeig;
using proxeig::testing::gaussian_signal;
using proxeig::testing::gaussian_vector;

namespace {

// Zero-padded "same" cross-correlation of a single-channel image.
std::vector<double> correlate(const std::vector<double>& img, std::size_t H, std::size_t W,
                              const std::vector<double>& k, std::size_t kh, std::size_t kw) {
  std::vector<double> out(H * W, 0.0);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x)
      for (std::size_t a = 0; a < kh; ++a)
        for (std::size_t b = 0; b < kw; ++b) {
          const long sy = long(y + a) - long(kh / 2), sx = long(x + b) - long(kw / 2);
          if (sy >= 0 && sy < long(H) && sx >= 0 && sx < long(W))
            out[y * W + x] += k[a * kw + b] * img[std::size_t(sy) * W + std::size_t(sx)];
        }
  return out;
}

}  // namespace

TEST(Net, DenseForwardMatchesMatrixProduct) {
  const FeedForwardNet net = random_dense_net({5, 7, 5}, {0.0, 0.0, true, false}, 3);
  const Signal u = gaussian_signal(Shape::flat(5), 4);
  const auto& l1 = net.layers()[0];
  const auto& l2 = net.layers()[1];
  Eigen::VectorXd h = proxeig::testing::to_eigen(DenseMatrix{l1.rows, l1.cols, l1.weights}) *
                          proxeig::testing::to_eigen(u) +
                      Eigen::Map<const Eigen::VectorXd>(l1.bias->data(), 7);
  h = h.cwiseMax(0.0);
  const Eigen::VectorXd out = proxeig::testing::to_eigen(DenseMatrix{l2.rows, l2.cols, l2.weights}) * h +
                              Eigen::Map<const Eigen::VectorXd>(l2.bias->data(), 5);
  const Signal got = net.forward(u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(got[std::size_t(i)], out(i), 1e-12);
  EXPECT_FALSE(net.bias_free());
  EXPECT_FALSE(net.all_relu());
}

TEST(Net, ConvForwardMatchesDirectCorrelation) {
  RandomNetOptions opts;
  opts.relu_last = false;
  const FeedForwardNet net = random_conv_net({1, 1}, 3, opts, 5);
  const Signal u = gaussian_signal(Shape::image(6, 9), 6);
  const auto expected = correlate(u.data(), 6, 9, net.layers()[0].weights, 3, 3);
  const Signal got = net.forward(u);
  EXPECT_EQ(got.shape(), u.shape());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-13);
}

TEST(Net, MultiChannelConvSumsChannels) {
  // Two input channels stacked vertically, one output channel: identity
  // kernels on both channels add the channels.
  std::vector<double> w(2 * 9, 0.0);
  w[4] = 1.0;
  w[9 + 4] = 1.0;
  const FeedForwardNet net({Layer::conv({1, 2, 3, 3}, w, std::nullopt, Activation::kNone)});
  const Signal u({1, 2, 3, 4, 10, 20, 30, 40}, Shape::image(4, 2));
  EXPECT_EQ(net.forward(u).data(), (std::vector<double>{11, 22, 33, 44}));
}

TEST(Net, ConstructionValidation) {
  EXPECT_THROW(FeedForwardNet({}), Error);
  EXPECT_THROW(FeedForwardNet({Layer::conv({1, 1, 2, 3}, std::vector<double>(6, 0.0), std::nullopt,
                                           Activation::kRelu)}),
               Error);
  EXPECT_THROW(FeedForwardNet({Layer::dense({2, 2, {1, 2, 3}}, std::nullopt, Activation::kRelu)}), Error);
  EXPECT_THROW(FeedForwardNet({Layer::dense(DenseMatrix::identity(2), std::vector<double>{1.0},
                                            Activation::kRelu)}),
               Error);
  // Mismatched consecutive dense layers.
  EXPECT_THROW(FeedForwardNet({Layer::dense(DenseMatrix::identity(3), std::nullopt, Activation::kRelu),
                               Layer::dense(DenseMatrix::identity(2), std::nullopt, Activation::kRelu)}),
               Error);
}

TEST(Net, LipschitzBoundDominatesObservedRatios) {
  const FeedForwardNet net = random_dense_net({8, 16, 8}, {}, 9);
  const double L = net.lipschitz_bound();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Signal a = gaussian_signal(Shape::flat(8), s), b = gaussian_signal(Shape::flat(8), s + 500);
    EXPECT_LE(distance(net.forward(a), net.forward(b)), L * distance(a, b) * (1 + 1e-12));
  }
  const FeedForwardNet conv = random_conv_net({1, 3, 1}, 3, {}, 10);
  const double Lc = conv.lipschitz_bound();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Signal a = gaussian_signal(Shape::image(8, 8), s), b = gaussian_signal(Shape::image(8, 8), s + 77);
    EXPECT_LE(distance(conv.forward(a), conv.forward(b)), Lc * distance(a, b) * (1 + 1e-12));
  }
}

TEST(ToyNet, ForwardAndEigensets) {
  const FeedForwardNet net = toy_two_pixel_net();
  EXPECT_EQ(net.forward(Signal({0.5, 2.0})).data(), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(net.forward(Signal({2.0, 0.5})).data(), (std::vector<double>{0.0, 0.0}));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double a = unif(rng);
    const Signal s1({a, 0.0}), s2({1.0 / (1.0 + a), 1.0 / (1.0 - a)}), s3({-a * 10.0, 0.0});
    for (const Signal& u : {s1, s2, s3}) {
      const ToyEigenClass c = toy_eigensets(u);
      ASSERT_NE(c.set, ToySet::kNone);
      EXPECT_LE(norm(c.lambda * u - net.forward(u)), 1e-8 * (1 + norm(u))) << to_string(c.set);
    }
    EXPECT_EQ(toy_eigensets(s2).set, ToySet::kS2);
    EXPECT_NEAR(toy_eigensets(s2).lambda, a, 1e-9);
  }
  const Signal s4({3.0, -2.0});
  EXPECT_EQ(toy_eigensets(s4).set, ToySet::kS4);
  EXPECT_EQ(toy_eigensets(Signal({0.3, 0.7})).set, ToySet::kNone);
}

TEST(ToyNet, SimplePowerReachesTheKernel) {
  const auto T = OperatorHandle::net(toy_two_pixel_net());
  const PowerResult r = simple_power(T, Signal({0.3, 0.2}));
  EXPECT_EQ(r.trace.status, Status::kKernelHit);
  EXPECT_NEAR(r.u[0], 1.0, 1e-15);
  EXPECT_NEAR(r.u[1], 0.0, 1e-15);
}

TEST(KernelCone, SingleLayerAgreesWithForward) {
  const FeedForwardNet net = random_dense_net({4, 6}, {0.0, 0.0, true, true}, 11);
  const auto& l = net.layers()[0];
  const KernelCone cone = kernel_cone_single({l.rows, l.cols, l.weights}, *l.bias);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  int members = 0;
  for (int s = 0; s < 3000; ++s) {
    std::vector<double> x(4);
    for (std::size_t i = 0; i < 4; ++i) x[i] = (s % 2 ? cone.tip[i] : 0.0) + g(rng) * (s % 2 ? 0.1 : 1.0);
    const Signal u(x);
    const bool zero = norm(net.forward(u)) <= kernel_tolerance(u);
    EXPECT_EQ(cone.contains(u), zero);
    EXPECT_EQ(kernel_member_multilayer(net, u), zero);
    members += zero;
  }
  EXPECT_GT(members, 0);
}

TEST(KernelCone, TipSolvesTheAffineSystem) {
  const DenseMatrix a{2, 3, {1, 0, 1, 0, 2, 0}};
  const KernelCone cone = kernel_cone_single(a, {1.0, -4.0});
  EXPECT_TRUE(cone.range_condition);
  EXPECT_LT(cone.residual, 1e-12);
  const Eigen::VectorXd t = proxeig::testing::to_eigen(cone.tip);
  EXPECT_NEAR(t(0) + t(2), -1.0, 1e-12);
  EXPECT_NEAR(t(1), 2.0, 1e-12);
  // Minimum norm: symmetric in the first and third coordinate.
  EXPECT_NEAR(t(0), t(2), 1e-12);

  // Overdetermined and inconsistent: range condition fails.
  const KernelCone bad = kernel_cone_single({3, 1, {1, 1, 1}}, {1.0, 2.0, 3.0});
  EXPECT_FALSE(bad.range_condition);
}

TEST(KernelCone, PropertyTestFindsNoViolations) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const FeedForwardNet net = random_dense_net({5, 3}, {0.0, 0.0, true, true}, s);
    const auto& l = net.layers()[0];
    const KernelCone cone = kernel_cone_single({l.rows, l.cols, l.weights}, *l.bias);
    const ConeReport r = cone_property_test(cone, 200, s);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_GT(r.checks, 0u);
  }
}

TEST(KernelCone, PropertyTestNeedsRangeCondition) {
  const KernelCone bad = kernel_cone_single({3, 1, {1, 1, 1}}, {1.0, 2.0, 3.0});
  const ConeReport r = cone_property_test(bad, 50, 1);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.samples, 0u);
}

TEST(KernelCone, MultilayerNeedsRelu) {
  const FeedForwardNet net = random_dense_net({3, 3}, {0.0, 0.0, false, false}, 1);
  EXPECT_THROW(kernel_member_multilayer(net, Signal({1.0, 2.0, 3.0})), Error);
}
