#include <gtest/gtest.h>

#include <cmath>

#include "proxeig/builtins.hpp"
#include "proxeig/core.hpp"
#include "proxeig/diagnostics.hpp"
#include "proxeig/error.hpp"
#include "proxeig/operator.hpp"
#include "proxeig/power.hpp"
#include "test_util.hpp"

using namespace proxeig;
using proxeig::testing::gaussian_signal;

namespace {

template <typename F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(ParameterRule, AlphaValues) {
  EXPECT_DOUBLE_EQ(make_alpha(ParameterRule::variable(0.9), 5.0, 3.0), 0.3);
  EXPECT_DOUBLE_EQ(make_alpha(ParameterRule::constant(0.9), 2.0, 7.0), 0.45);
  double prev = 0.0;
  for (double tau : {1.0, 10.0, 100.0, 1e4, 1e8}) {
    const double a = make_alpha(ParameterRule::feld(0.9, tau), 1.0, 3.0);
    EXPECT_LT(a, 0.3);
    EXPECT_GT(a, prev);
    prev = a;
  }
  EXPECT_NEAR(prev, 0.3, 1e-8);
  expect_error(ErrorKind::kNullSpaceInput, [] { make_alpha(ParameterRule::variable(0.9), 1.0, 0.0); });
  expect_error(ErrorKind::kInvalidInput, [] { make_alpha(ParameterRule::variable(1.0), 1.0, 1.0); });
  expect_error(ErrorKind::kInvalidInput, [] { make_alpha(ParameterRule::feld(0.5, 0.0), 1.0, 1.0); });
}

TEST(SimplePower, MatchesDenseEigensolver) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Eigen::MatrixXd a = proxeig::testing::random_spd(10, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    PowerOptions opts;
    opts.eps = 1e-14;
    opts.max_iters = 100000;
    const PowerResult r = simple_power(OperatorHandle::linear(proxeig::testing::from_eigen(a)),
                                       gaussian_signal(Shape::flat(10), 100 + s), opts);
    const double truth = es.eigenvalues()(9);
    EXPECT_LT(std::abs(r.lambda - truth) / truth, 1e-8);
    const double ang = proxeig::testing::angle_between(proxeig::testing::to_eigen(r.u), es.eigenvectors().col(9));
    EXPECT_LT(std::min(ang, 180.0 - ang), 1e-6);
  }
}

TEST(SimplePower, KernelHit) {
  DenseMatrix zero{3, 3, std::vector<double>(9, 0.0)};
  const Signal f({1.0, 2.0, 3.0});
  const PowerResult r = simple_power(OperatorHandle::linear(zero), f);
  EXPECT_EQ(r.trace.status, Status::kKernelHit);
  EXPECT_EQ(r.lambda, 0.0);
  EXPECT_LT(distance(r.u, normalized(f)), 1e-15);
}

TEST(SimplePower, MaxItersWhenNotConverged) {
  // A rotation never settles.
  DenseMatrix rot{2, 2, {0.0, -1.0, 1.0, 0.0}};
  PowerOptions opts;
  opts.max_iters = 7;
  const PowerResult r = simple_power(OperatorHandle::linear(rot), Signal({1.0, 0.0}), opts);
  EXPECT_EQ(r.trace.status, Status::kMaxIters);
  EXPECT_EQ(r.iters, 7);
}

TEST(SimplePower, OptionValidation) {
  PowerOptions opts;
  opts.eps = 0.0;
  EXPECT_THROW(simple_power(OperatorHandle::linear(DenseMatrix::identity(2)), Signal({1.0, 1.0}), opts),
               Error);
}

TEST(RangePower, IdentityIsAFixedPoint) {
  auto id = OperatorHandle::function([](const Signal& u) { return u; }, "identity");
  const Signal f = gaussian_signal(Shape::flat(6), 1);
  const PowerResult r = range_power(id, f);
  EXPECT_EQ(r.trace.status, Status::kConverged);
  EXPECT_EQ(r.iters, 1);
  EXPECT_NEAR(r.lambda, 1.0, 1e-14);
  ASSERT_TRUE(r.relaxed_residual);
  EXPECT_LT(*r.relaxed_residual, 1e-14);
}

TEST(RangePower, NormConservationAndShiftInvariance) {
  const Functional J = Functional::aniso_tv(16, 16);
  const Signal f = noisy_disk(16, 0.1, 2);
  const double target = norm(mean_project(f).centered);
  PowerOptions opts;
  opts.eps = 1e-8;
  opts.max_iters = 300;
  double worst = 0.0;
  opts.on_iterate = [&](int k, const Signal& u) {
    if (k > 0) worst = std::max(worst, std::abs(norm(mean_project(u).centered) - target));
  };
  const PowerResult a = range_power(OperatorHandle::prox(J, 0.05), f, opts);
  EXPECT_LT(worst, 1e-10);
  opts.on_iterate = nullptr;
  const PowerResult b = range_power(OperatorHandle::prox(J, 0.05), add_constant(f, 2.0), opts);
  EXPECT_LT(distance(mean_project(a.u).centered, mean_project(b.u).centered), 1e-6);
  EXPECT_GT(a.lambda, 0.0);
  EXPECT_LT(a.lambda, 1.0);
}

TEST(RangePower, Errors) {
  auto id = OperatorHandle::function([](const Signal& u) { return u; }, "identity");
  expect_error(ErrorKind::kInvalidInput, [&] { range_power(id, Signal::constant(Shape::flat(4), 2.0)); });
  auto flat = OperatorHandle::function(
      [](const Signal& u) { return Signal::constant(u.shape(), 1.0); }, "flat");
  expect_error(ErrorKind::kDegenerateOutput, [&] { range_power(flat, Signal({1.0, 2.0})); });
}

TEST(Restart, ZeroProjectionIterationsIsUnconstrained) {
  const Eigen::MatrixXd a = proxeig::testing::random_spd(8, 4);
  const auto T = OperatorHandle::linear(proxeig::testing::from_eigen(a));
  const Signal f = gaussian_signal(Shape::flat(8), 5);
  const Signal known = normalized(gaussian_signal(Shape::flat(8), 6));
  const PowerResult x = simple_power(T, f), y = restart_orthogonal(T, f, {known}, 0, RestartMethod::kSimple);
  EXPECT_EQ(x.u.data(), y.u.data());
  EXPECT_EQ(x.iters, y.iters);
}

TEST(Restart, ProjectionPhaseStaysOrthogonal) {
  const Eigen::MatrixXd a = proxeig::testing::random_spd(8, 7);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> top(8);
  for (int i = 0; i < 8; ++i) top[std::size_t(i)] = es.eigenvectors()(i, 7);
  const Signal known(top);
  PowerOptions opts;
  double worst = 0.0;
  opts.on_iterate = [&](int k, const Signal& u) {
    if (k > 0 && k <= 50) worst = std::max(worst, std::abs(dot(u, known)));
  };
  opts.max_iters = 60;
  restart_orthogonal(OperatorHandle::linear(proxeig::testing::from_eigen(a)),
                     gaussian_signal(Shape::flat(8), 8), {known}, 50, RestartMethod::kSimple, opts);
  EXPECT_LT(worst, 1e-12);
  expect_error(ErrorKind::kRestartFailure, [&] {
    restart_orthogonal(OperatorHandle::linear(DenseMatrix::identity(8)), known, {known}, 5,
                       RestartMethod::kSimple);
  });
}

TEST(ProximalPower, ConvergesToL1EigenvectorWithPredictedLambda) {
  // For l1 the limit has equal magnitudes on its support and the variable
  // rule gives lambda = 1 - c.
  for (std::uint64_t s = 0; s < 5; ++s) {
    const PowerResult r = proximal_power(Functional::l1(), ParameterRule::variable(0.6),
                                         gaussian_signal(Shape::flat(12), s));
    EXPECT_EQ(r.trace.status, Status::kConverged);
    EXPECT_NEAR(r.lambda, 0.4, 1e-10);
    double mag = 0.0;
    for (double x : r.u.values())
      if (x != 0.0) {
        if (mag == 0.0) mag = std::abs(x);
        EXPECT_NEAR(std::abs(x), mag, 1e-12);
      }
  }
}

TEST(ProximalPower, RejectsNullSpaceInputs) {
  const Functional J = Functional::aniso_tv(4, 4);
  expect_error(ErrorKind::kNullSpaceInput, [&] {
    proximal_power(J, ParameterRule::variable(0.9), Signal::constant(Shape::image(4, 4), 3.0));
  });
}

TEST(ProximalPower, RecordsRemovedNullComponentAndDecreasesEnergy) {
  const Functional J = Functional::aniso_tv(24, 24);
  const Signal f = add_constant(noisy_disk(24, 0.1, 3), 5.0);
  PowerOptions opts;
  int calls = 0;
  opts.on_iterate = [&](int, const Signal&) { ++calls; };
  const PowerResult r = proximal_power(J, ParameterRule::variable(0.9), f, opts);
  ASSERT_TRUE(r.removed_null_component);
  EXPECT_NEAR(mean(*r.removed_null_component), mean(f), 1e-12);
  EXPECT_EQ(calls, r.iters);
  EXPECT_NEAR(mean(r.u), 0.0, 1e-12);
  for (std::size_t k = 1; k < r.trace.records.size(); ++k)
    EXPECT_LE(*r.trace.records[k].energy_J, *r.trace.records[k - 1].energy_J + 1e-8);
  EXPECT_LE(*r.energy_final, *r.energy_initial);
  for (const auto& rec : r.trace.records) EXPECT_GE(*rec.collinearity_gap, -1e-10);
}

TEST(ProximalPower, ReportsEigenvalueOfProx) {
  const Functional J = Functional::aniso_tv(24, 24);
  const ParameterRule rule = ParameterRule::variable(0.9);
  const PowerResult r = proximal_power(J, rule, noisy_disk(24, 0.1, 4));
  ASSERT_EQ(r.trace.status, Status::kConverged);
  // Independent check: one more prox step from u*.
  const Signal v = prox_composite(J, r.u, 0.9 / J.evaluate(r.u)).v;
  EXPECT_NEAR(norm(v), r.lambda, 1e-4);
  EXPECT_LT(angle_deg(r.u, v), 0.5);
}

TEST(Operator, ComplementAndCopies) {
  auto id = OperatorHandle::linear(DenseMatrix::identity(3));
  auto c = OperatorHandle::complement(id);
  EXPECT_EQ(c.kind(), OperatorHandle::Kind::kComplement);
  EXPECT_EQ(max_abs(c(Signal({1.0, 2.0, 3.0}))), 0.0);
  const OperatorHandle copy = c;
  EXPECT_EQ(copy.kind(), OperatorHandle::Kind::kComplement);
  EXPECT_FALSE(copy.describe().empty());
  EXPECT_EQ(c.functional(), nullptr);
}

TEST(Operator, ConstantRuleAnchorsOnFirstInput) {
  const Functional J = Functional::l1();
  auto T = OperatorHandle::prox(J, ParameterRule::constant(0.5));
  const Signal a({2.0, 0.0}), b({1.0, 1.0});
  T(a);  // alpha = 0.5 / 2
  EXPECT_EQ(T(b).data(), soft_threshold(b, 0.25).data());
  T.reset();
  T(b);  // alpha = 0.5 / 2
  EXPECT_EQ(T(a).data(), soft_threshold(a, 0.25).data());
  ASSERT_NE(T.functional(), nullptr);
}

TEST(UnbiasedLambda, Values) {
  auto half = OperatorHandle::function([](const Signal& u) { return 0.5 * u; }, "half");
  EXPECT_DOUBLE_EQ(unbiased_lambda_check(half, Signal({1.0, 3.0})), 0.5);
  expect_error(ErrorKind::kInvalidInput, [&] { unbiased_lambda_check(half, Signal({1.0, -1.0})); });
  expect_error(ErrorKind::kInvalidInput, [&] { unbiased_lambda_check(half, Signal({0.0, 0.0})); });
}
