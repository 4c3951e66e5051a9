#include <cmath>

#include <gtest/gtest.h>

#include "mvsdde/diagnostics.hpp"
#include "mvsdde/error.hpp"
#include "mvsdde/fixedpoint.hpp"
#include "mvsdde/models.hpp"
#include "mvsdde/particle.hpp"
#include "mvsdde/solver.hpp"
#include "oracles.hpp"

using namespace mvsdde;

namespace {

OpinionParams tent_params() {
  OpinionParams p;
  p.kernel_current = p.kernel_delayed = tent_kernel(1.0, 1.0);
  return p;
}

std::vector<MeasurePair> all_pairs(const ModelSpec& m, const std::vector<EmpiricalMeasure>& ms) {
  std::vector<MeasurePair> out;
  for (const auto& a : ms)
    for (const auto& b : ms) out.push_back(make_measure_pair(m, a, b));
  return out;
}

}  // namespace

TEST(LyapunovProbe, OpinionEstimateBelowDeclaredZeta) {
  const OpinionParams p = tent_params();
  const ModelSpec m = opinion_model(p);
  const auto measures = random_measures(m, 6, 32, 5.0, 1);
  const auto points = uniform_probe_points(m, 10000, 5.0, 1);
  const LyapunovProbe probe = check_lyapunov(m, points, measures, 8.5);
  EXPECT_LE(probe.report.estimated_constant, 8.5);
  EXPECT_FALSE(probe.report.violated());
  EXPECT_TRUE(probe.report.checked_declared);
}

TEST(LyapunovProbe, ViolationProducesWitness) {
  const ModelSpec m = opinion_model(tent_params());
  const auto measures = random_measures(m, 3, 8, 5.0, 2);
  const auto points = uniform_probe_points(m, 2000, 5.0, 2);
  const LyapunovProbe probe = check_lyapunov(m, points, measures, 0.1);
  EXPECT_TRUE(probe.report.violated());
  ASSERT_TRUE(probe.report.witness.has_value());
  EXPECT_GT(probe.report.witness->lhs, probe.report.witness->rhs);
}

TEST(LyapunovProbe, GeneratorRatioInvariantUnderScalingOfV) {
  ModelSpec m = delayed_ou(1.0, 0.5, 1.0, 1.0);
  std::vector<DelayedState> far;
  for (double s : {-1.0, 1.0})
    for (double r : {800.0, 1000.0}) far.push_back(DelayedState::scalar({0.3 * r, s * r}));
  const std::vector<EmpiricalMeasure> measures{EmpiricalMeasure::dirac(DelayedState::scalar({0, 0}))};
  const double base = check_lyapunov(m, far, measures).generator_constant;
  LyapunovSpec scaled = m.lyapunov;
  const double c = 3.0;
  const auto value = scaled.value;
  const auto gradient = scaled.gradient;
  const auto hessian = scaled.hessian;
  scaled.value = [=](const Eigen::VectorXd& x) { return c * value(x); };
  scaled.gradient = [=](const Eigen::VectorXd& x) { return Eigen::VectorXd(c * gradient(x)); };
  scaled.hessian = [=](const Eigen::VectorXd& x) { return Eigen::MatrixXd(c * hessian(x)); };
  m.lyapunov = scaled;
  const double other = check_lyapunov(m, far, measures).generator_constant;
  EXPECT_NEAR(other, base, 1e-5 * std::abs(base));
}

TEST(LipschitzProbe, ContractiveDriftNeverViolates) {
  const ModelSpec m = delayed_ou(1.0, 0.0, 1.0, 1.0);
  const auto pairs = probe_pairs(m, 2000, 5.0, 3);
  const std::vector<MeasurePair> mp{make_measure_pair(m, EmpiricalMeasure::dirac(DelayedState::scalar({0, 0})),
                                                      EmpiricalMeasure::dirac(DelayedState::scalar({0, 0})))};
  const ProbeReport r = check_lipschitz(m, pairs, mp, 0.0, 0.0);
  EXPECT_FALSE(r.violated());
  EXPECT_EQ(r.estimated_constant, 0.0);
}

TEST(LipschitzProbe, DegeneratePairsAreInconclusive) {
  const ModelSpec m = delayed_ou(1.0, 0.5, 1.0, 1.0);
  const auto x = DelayedState::scalar({1, 2});
  const auto y = DelayedState::scalar({3, 2});
  const auto mu = EmpiricalMeasure::dirac(x);
  const ProbeReport r = check_lipschitz(m, {{x, x}, {x, y}}, {make_measure_pair(m, mu, mu)}, 1.0, 1.0);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_FALSE(r.violated());
}

TEST(LipschitzProbe, OpinionFormulaConstantsHoldAndHalvingKFails) {
  const OpinionParams p = tent_params();
  const OpinionConstants c = opinion_constants(p);
  ASSERT_DOUBLE_EQ(c.K, 4.0);
  ASSERT_DOUBLE_EQ(c.theta, 2.0);
  const ModelSpec m = opinion_model(p);
  const auto pairs = probe_pairs(m, 10000, 5.0, 4);
  const auto mp = all_pairs(m, random_measures(m, 6, 16, 5.0, 4));
  const ProbeReport ok = check_lipschitz(m, pairs, mp, c.K, c.theta);
  EXPECT_FALSE(ok.violated());
  const ProbeReport bad = check_lipschitz(m, pairs, mp, c.K / 2, c.theta);
  EXPECT_TRUE(bad.violated());
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_TRUE(bad.witness->y.has_value());
  EXPECT_GT(bad.witness->lhs, bad.witness->rhs);
}

TEST(MomentBound, ClosedForm) {
  EXPECT_NEAR(moment_bound_formula(1.0, 1.0, 1.0, 1.0), 4.0 * std::exp(4.0), 1e-12);
  EXPECT_NEAR(moment_bound_formula(1.0, 1.0, 1.0, 1.0), 218.39260013257694, 1e-9);
  EXPECT_NEAR(moment_bound_formula(1.0, 1.0, 1.0, 1.0, 3), (1.0 + 1.0 + 4.0) * std::exp(6.0), 1e-9);
}

TEST(MomentBound, DegenerateHorizon) {
  // Deterministic xi = 1, T -> 0: bound -> V(x0) + 2 zeta sup V(xi), observed = V(x0).
  ModelSpec m = delayed_ou(1.0, 0.5, 0.0, 1.0);
  m.lyapunov.zeta = 2.0;
  const TimeGrid g = make_grid(1.0, 1e-3, 1000);
  const auto paths = simulate_particles(m, 1, 4, g);
  const MomentBound mb = moment_bound(m, paths);
  EXPECT_DOUBLE_EQ(mb.expected_V0, 1.0);
  EXPECT_DOUBLE_EQ(mb.observed, 1.0);
  EXPECT_NEAR(mb.bound, 1.0 + 2.0 * 2.0 * 1.0, 0.1);
}

TEST(MomentBound, DelayedOuHasLargeMargin) {
  const ModelSpec m = delayed_ou(1.0, 0.5, 1.0, 1.0);
  ASSERT_TRUE(m.lyapunov.zeta.has_value());
  const TimeGrid g = make_grid(1.0, 2.0, 32);
  const auto paths = simulate_particles(m, 7, 512, g);
  const MomentBound mb = moment_bound(m, paths);
  EXPECT_LT(10.0 * (mb.observed + 2.0 * mb.observed_se), mb.bound);
}

TEST(Gn, ThresholdsAndClosedFormMatchQuadrature) {
  EXPECT_DOUBLE_EQ(gn_threshold(0), 1.0);
  EXPECT_DOUBLE_EQ(gn_threshold(2), std::exp(-3.0));
  for (int n = 1; n <= 6; ++n) {
    const double lo = gn_threshold(n), hi = gn_threshold(n - 1);
    for (double r : {0.5 * lo, 1.5 * lo, std::sqrt(lo * hi), 0.9 * hi, 1.1 * hi, 2.0, -0.7, 10.0}) {
      EXPECT_NEAR(gn_eval(n, r).g, oracle::gn_quadrature(n, r), 1e-10) << "n=" << n << " r=" << r;
    }
  }
}

TEST(Gn, FamilyProperties) {
  for (int n = 1; n <= 6; ++n) {
    const double lo = gn_threshold(n), hi = gn_threshold(n - 1);
    for (int k = -2000; k <= 2000; ++k) {
      const double r = 10.0 * k / 2000.0;
      const GnValue v = gn_eval(n, r);
      EXPECT_LE(std::abs(v.dg), 1.0 + 1e-10);
      EXPECT_EQ(v.g, gn_eval(n, -r).g);
      EXPECT_LE(std::abs(v.g - std::abs(r)), hi + 1e-10);
      const double a = std::abs(r);
      if (a > lo && a < hi) EXPECT_LE(v.d2g, 2.0 / (n * a));
      else EXPECT_EQ(v.d2g, 0.0);
    }
  }
  EXPECT_THROW(gn_eval(0, 1.0), InvalidArgument);
}

TEST(Radial, IdenticalFlowsGiveZeroDifference) {
  const ModelSpec m = opinion_model(OpinionParams{});
  const TimeGrid g = make_grid(0.25, 0.5, 8);
  const MeasureFlow f = MeasureFlow::constant(g, initial_law(m, g, 5, 64));
  const RadialReport r = radial_check(m, f, f, 5, 64, g);
  EXPECT_TRUE(r.passed);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.lhs, 0.0);
    EXPECT_EQ(row.rhs, 0.0);
  }
}

TEST(Radial, MeasureFreeModelGivesZeroDifference) {
  const ModelSpec m = delayed_ou(1.0, 0.5, 1.0, 0.5);
  const TimeGrid g = make_grid(0.5, 1.0, 8);
  const MeasureFlow a = MeasureFlow::constant(g, initial_law(m, g, 5, 32));
  const MeasureFlow b = MeasureFlow::constant(g, EmpiricalMeasure(1, 1, Eigen::MatrixXd::Constant(2, 32, 4.0)));
  const RadialReport r = radial_check(m, a, b, 5, 32, g);
  EXPECT_TRUE(r.passed);
  for (const auto& row : r.rows) EXPECT_EQ(row.lhs, 0.0);
}

TEST(Radial, OpinionDistinctFlows) {
  const ModelSpec m = opinion_model(OpinionParams{});
  const TimeGrid g = make_grid(0.25, 1.0, 16);
  const MeasureFlow mu0 = MeasureFlow::constant(g, initial_law(m, g, 6, 128));
  const MeasureFlow mu1 = apply_H(m, mu0, 6, 128, g);
  const RadialReport r = radial_check(m, mu0, mu1, 6, 128, g);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.rows.back().lhs, 0.0);
}

TEST(Radial, RequiresDeclaredConstants) {
  ModelSpec m = opinion_model(OpinionParams{});
  m.lipschitz_K.reset();
  const TimeGrid g = make_grid(0.25, 0.5, 8);
  const MeasureFlow f = MeasureFlow::constant(g, initial_law(m, g, 5, 8));
  EXPECT_THROW(radial_check(m, f, f, 5, 8, g), InvalidArgument);
}

TEST(LipschitzProbe, WitnessReproducesViolation) {
  const ModelSpec m = opinion_model(tent_params());
  const auto pairs = probe_pairs(m, 4000, 5.0, 9);
  const auto mp = all_pairs(m, random_measures(m, 4, 16, 5.0, 9));
  const ProbeReport r = check_lipschitz(m, pairs, mp, 1.0, 0.5);
  ASSERT_TRUE(r.violated());
  ASSERT_TRUE(r.witness && r.witness->y);
  const auto& w = *r.witness;
  const MeasurePair& pair = mp[w.measure_index];
  const double dx0 = w.x.current()(0) - w.y->current()(0);
  const double db = m.drift(w.x, pair.mu)(0) - m.drift(*w.y, pair.nu)(0);
  const double lhs = std::max(dx0 * db, 0.0);
  const double rhs = std::abs(dx0) * (1.0 * eval_norm(w.x, *w.y) + 0.5 * pair.distance);
  EXPECT_NEAR(lhs, w.lhs, 1e-12);
  EXPECT_NEAR(rhs, w.rhs, 1e-12);
  EXPECT_GT(lhs, rhs);
}
