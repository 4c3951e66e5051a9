#include <cmath>

#include <gtest/gtest.h>

#include "mvsdde/convergence.hpp"
#include "mvsdde/models.hpp"
#include "mvsdde/particle.hpp"
#include "oracles.hpp"

using namespace mvsdde;

TEST(Convergence, RegressionSlopeOfExactLine) {
  EXPECT_NEAR(regression_slope({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-14);
  EXPECT_NEAR(regression_slope({-8, -7, -6}, {-4, -3.5, -3}), 0.5, 1e-14);
}

TEST(Convergence, IndependentSeedDiffers) {
  EXPECT_NE(independent_seed(1), 1u);
  EXPECT_NE(independent_seed(1), independent_seed(2));
}

TEST(Convergence, Wasserstein1IsTransportWithIdentityPsiAndZeroWeight) {
  const auto mu = EmpiricalMeasure::from_states({DelayedState::scalar({0, 0}), DelayedState::scalar({1, 3})});
  const auto nu = EmpiricalMeasure::from_states({DelayedState::scalar({1, 1}), DelayedState::scalar({0, 2})});
  const double w = wasserstein_1(mu, nu);
  EXPECT_NEAR(w, oracle::brute_force_transport(mu.atoms(), nu.atoms(), 1, 1, false, false), 1e-15);
}

TEST(Convergence, StrongOrderOfAdditiveNoiseDelayedOu) {
  const ModelSpec m = delayed_ou(1.0, 0.5, 1.0, 1.0);
  const StrongOrderStudy s = strong_order_study(m, 1.0, {8, 16, 32}, 16, 200, 17);
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.reference_steps_per_delay, 32 * 16);
  EXPECT_GT(s.rows[0].rms_error, s.rows[1].rms_error);
  EXPECT_GT(s.rows[1].rms_error, s.rows[2].rms_error);
  EXPECT_GT(s.order, 0.8);
}

TEST(Convergence, ParticleVersusFixpointSample) {
  const ModelSpec m = opinion_model(OpinionParams{});
  const TimeGrid g = make_grid(0.25, 0.5, 4);
  const ChaosSample s = particle_vs_fixpoint(m, g, 32, 3, PicardOptions{});
  EXPECT_TRUE(s.picard_converged);
  EXPECT_GT(s.w1, 0.0);
  EXPECT_EQ(s.particles, 32u);
  const ChaosSample again = particle_vs_fixpoint(m, g, 32, 3, PicardOptions{});
  EXPECT_EQ(s.w1, again.w1);
}

TEST(Particle, InteractionChangesTrajectories) {
  const TimeGrid g = make_grid(0.25, 0.5, 8);
  OpinionParams with;
  OpinionParams without;
  without.kernel_current = without.kernel_delayed = zero_kernel();
  const auto a = simulate_particles(opinion_model(with), 2, 16, g);
  const auto b = simulate_particles(opinion_model(without), 2, 16, g);
  EXPECT_EQ(a[0].at(0), b[0].at(0));
  EXPECT_NE(a[0].at(g.steps()), b[0].at(g.steps()));
}
