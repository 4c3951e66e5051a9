#include <cmath>

#include <gtest/gtest.h>

#include "mvsdde/error.hpp"
#include "mvsdde/measure.hpp"
#include "mvsdde/model.hpp"
#include "mvsdde/path.hpp"

using namespace mvsdde;

namespace {

ModelSpec scalar_model(DriftFn drift, double sigma) {
  ModelSpec m;
  m.name = "test";
  m.dim = 1;
  m.tau = 1.0;
  m.delays = {constant_delay(1.0)};
  m.drift = std::move(drift);
  m.diffusion = [sigma](const DelayedState&) { return Eigen::MatrixXd::Constant(1, 1, sigma); };
  m.initial_segment = [](std::uint64_t, std::size_t, double) { return Eigen::VectorXd::Ones(1); };
  return m;
}

}  // namespace

TEST(Norm, AveragesComponentNorms) {
  EXPECT_DOUBLE_EQ(eval_norm(DelayedState::scalar({3, 1}), DelayedState::scalar({0, 0})), 2.0);
  EXPECT_DOUBLE_EQ(eval_norm(DelayedState::scalar({3, 1}), DelayedState::scalar({3, 1})), 0.0);
  EXPECT_DOUBLE_EQ(eval_norm(DelayedState::scalar({3, 0, 0}), DelayedState::scalar({0, 0, 0})), 1.0);
}

TEST(Norm, UsesEuclideanNormPerComponent) {
  const auto x = DelayedState::from_components({Eigen::Vector2d(3, 4), Eigen::Vector2d(0, 0)});
  const DelayedState y(1, 2);
  EXPECT_DOUBLE_EQ(eval_norm(x, y), 2.5);
}

TEST(Norm, RejectsShapeMismatch) {
  EXPECT_THROW(eval_norm(DelayedState::scalar({1, 2}), DelayedState::scalar({1, 2, 3})), InvalidArgument);
}

TEST(DelayedStateLayout, OldestComponentFirst) {
  const auto x = DelayedState::scalar({5, 6, 7});
  EXPECT_EQ(x.n_delays(), 2);
  EXPECT_DOUBLE_EQ(x.lag(2)(0), 5);
  EXPECT_DOUBLE_EQ(x.lag(1)(0), 6);
  EXPECT_DOUBLE_EQ(x.current()(0), 7);
}

TEST(Generator, LinearDriftUnitNoise) {
  const auto m = scalar_model([](const DelayedState& x, const EmpiricalMeasure&) { return Eigen::VectorXd(-x.current()); },
                              1.0);
  const auto x = DelayedState::scalar({0, 2});
  EXPECT_DOUBLE_EQ(eval_generator(x, EmpiricalMeasure::dirac(x), m), -7.0);
}

TEST(Generator, ZeroDynamicsGiveZero) {
  const auto m = scalar_model([](const DelayedState&, const EmpiricalMeasure&) { return Eigen::VectorXd::Zero(1); }, 0.0);
  for (double v : {-3.0, 0.0, 1.5}) {
    const auto x = DelayedState::scalar({v, 2 * v});
    EXPECT_DOUBLE_EQ(eval_generator(x, EmpiricalMeasure::dirac(x), m), 0.0);
  }
}

TEST(Lyapunov, AnalyticDerivativesMatchFiniteDifferences) {
  const LyapunovSpec v = quadratic_lyapunov();
  const Eigen::Vector3d x(0.3, -1.7, 2.2);
  EXPECT_LT((fd_gradient(v, x) - v.gradient(x)).norm(), 1e-6);
  EXPECT_LT((fd_hessian(v, x) - v.hessian(x)).norm(), 1e-4);
  EXPECT_DOUBLE_EQ(v.joint(DelayedState::scalar({1, 2})), 5.0);
}

TEST(Psi, NamedFamilies) {
  EXPECT_DOUBLE_EQ(psi_by_name("identity")(2.0), 2.0);
  EXPECT_DOUBLE_EQ(psi_by_name("quadratic")(2.0), 4.0);
  EXPECT_DOUBLE_EQ(psi_by_name("quadratic").derivative(2.0), 3.0);
  EXPECT_DOUBLE_EQ(lyapunov_by_name("zero")(Eigen::VectorXd::Ones(2)), 0.0);
  EXPECT_THROW(psi_by_name("cubic"), InvalidArgument);
  EXPECT_THROW(lyapunov_by_name("quartic"), InvalidArgument);
}

TEST(History, GridAlignedDelayReturnsStoredValue) {
  const TimeGrid g = make_grid(1.0, 2.0, 4);
  ParticlePath p(g, 0, 1);
  for (int k = -4; k <= 8; ++k) p.at(k)(0) = 10.0 + k;
  for (int k = 0; k <= 8; ++k) {
    const PathSample s = eval_history(p, g.time(k), constant_delay(1.0));
    EXPECT_TRUE(s.exact);
    EXPECT_EQ(s.value(0), 10.0 + k - 4);
  }
}

TEST(History, FullDelayAtZeroReadsStartOfSegment) {
  const TimeGrid g = make_grid(1.0, 1.0, 2);
  ParticlePath p(g, 0, 1);
  p.at(-2)(0) = 7.5;
  EXPECT_EQ(eval_history(p, 0.0, constant_delay(1.0)).value(0), 7.5);
}

TEST(History, SineDelayInterpolatesLinearly) {
  // Path on the points -1, -0.5, 0, 0.5, 1 with values 2, -1, 3, 4, 0.
  const TimeGrid g = make_grid(1.0, 1.0, 2);
  ParticlePath p(g, 0, 1);
  const double values[] = {2, -1, 3, 4, 0};
  for (int k = -2; k <= 2; ++k) p.at(k)(0) = values[k + 2];
  const Delay delay = varying_delay([](double t) { return 0.5 + 0.25 * std::sin(t); });

  // t = 0.3: s = -0.2 - 0.25 sin(0.3), between -0.5 (value -1) and 0 (value 3).
  const double s1 = 0.3 - 0.5 - 0.25 * std::sin(0.3);
  const double w1 = (s1 + 0.5) / 0.5;
  const PathSample a = eval_history(p, 0.3, delay);
  EXPECT_FALSE(a.exact);
  EXPECT_NEAR(a.value(0), (1 - w1) * -1.0 + w1 * 3.0, 1e-14);

  // t = 1: s = 0.5 - 0.25 sin(1), between 0 (value 3) and 0.5 (value 4).
  const double s2 = 0.5 - 0.25 * std::sin(1.0);
  const double w2 = s2 / 0.5;
  EXPECT_NEAR(eval_history(p, 1.0, delay).value(0), (1 - w2) * 3.0 + w2 * 4.0, 1e-14);
}

TEST(History, RejectsLookupBeforeSegment) {
  const TimeGrid g = make_grid(1.0, 1.0, 2);
  ParticlePath p(g, 0, 1);
  EXPECT_THROW(eval_history(p, 0.0, constant_delay(1.5)), InvalidArgument);
  EXPECT_THROW(p.sample(1.5), InvalidArgument);
}

TEST(Validate, DelayRange) {
  auto m = scalar_model([](const DelayedState&, const EmpiricalMeasure&) { return Eigen::VectorXd::Zero(1); }, 0.0);
  m.delays = {varying_delay([](double t) { return 0.5 + 0.25 * std::sin(t); })};
  EXPECT_NO_THROW(validate_model(m, 10.0));
  m.delays = {constant_delay(1.1)};
  EXPECT_THROW(validate_model(m, 1.0), InvalidArgument);
  m.delays = {varying_delay([](double t) { return 1.0 - t; })};
  EXPECT_THROW(validate_model(m, 1.0), InvalidArgument);
  m.delays.clear();
  EXPECT_THROW(validate_model(m, 1.0), InvalidArgument);
}
