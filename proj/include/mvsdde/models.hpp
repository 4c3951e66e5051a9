#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvsdde/measure.hpp"
#include "mvsdde/model.hpp"

namespace mvsdde {

/// Compactly supported interaction kernel Phi on R+ with its sup, Lipschitz
/// constant and support radius.
struct InteractionKernel {
  std::string shape;
  std::function<double(double)> phi;
  double sup = 0.0;
  double lipschitz = 0.0;
  double support = 0.0;
};

/// height * max(0, 1 - (r/R)^2)^2. Lipschitz constant 8 height / (3 sqrt(3) R).
InteractionKernel bump_kernel(double height, double radius);
/// height * max(0, 1 - r/R). Lipschitz constant height / R.
InteractionKernel tent_kernel(double height, double radius);
InteractionKernel zero_kernel();

/// Opinion drift phi(x) with Lipschitz constant and value at 0.
struct Reversion {
  std::function<double(double)> fn;
  double lipschitz = 0.0;
  double at_zero = 0.0;
};

/// phi(x) = -rate (x - target).
Reversion linear_reversion(double rate, double target = 0.0);

struct OpinionParams {
  InteractionKernel kernel_delayed = bump_kernel(1.0, 1.0);
  InteractionKernel kernel_current = bump_kernel(1.0, 1.0);
  Reversion reversion_delayed = linear_reversion(1.0);
  Reversion reversion_current = linear_reversion(1.0);
  double sigma = 1.0;
  double tau = 0.25;
  /// Initial opinions: xi_i(t) = init_mean + init_std Z_i, constant in t.
  double init_mean = 0.0;
  double init_std = 1.0;

  double kernel_norm() const;
  double kernel_lipschitz() const;
  double kernel_support() const;
  double reversion_lipschitz() const;
};

/// Scalar opinion drift
///   int Phi_{-1}(|x_{-1} - y|)(x_{-1} - y) mu_{-1}(dy) + phi_{-1}(x_{-1})
///   + int Phi_0(|x_0 - y|)(x_0 - y) mu_0(dy) + phi_0(x_0),
/// with mu_{-1}, mu_0 the marginals of the joint empirical measure.
double opinion_drift(const DelayedState& x, const EmpiricalMeasure& mu, const OpinionParams& params);

struct OpinionConstants {
  double A = 0.0;
  double K = 0.0;
  double theta = 0.0;
  double zeta = 0.0;
  /// zeta with ||Phi||^2 / 2 in place of ||Phi|| / 2.
  double zeta_squared_norm = 0.0;
};

/// A = 2 max{||Phi||, aR}, K = 2 max{A, b}, theta = A,
/// zeta = max{6 + ||Phi||/2 + 2b^2, phi_0(0)^2 + phi_{-1}(0)^2 + sigma^2}.
OpinionConstants opinion_constants(double kernel_norm, double kernel_lipschitz, double support, double reversion_lipschitz,
                                   double phi0_at_zero, double phim1_at_zero, double sigma);
OpinionConstants opinion_constants(const OpinionParams& params);

ModelSpec opinion_model(const OpinionParams& params);

/// Constant path xi(seed, i, t) = mean + std Z_i with Z_i standard normal from
/// the particle's initial-condition stream.
InitialSegmentFn gaussian_constant_segment(int dim, double mean, double std_dev);
/// xi = value for every particle and time.
InitialSegmentFn constant_segment(Eigen::VectorXd value);

/// b = -a x_0 - c x_{-1}, sigma = s I, V = |x|^2, one constant delay tau.
ModelSpec delayed_ou(double a, double c, double sigma, double tau, int dim = 1);
/// delayed_ou(0, 1, 0, 1) with xi = 1: X(t) = 1 - t on [0, 1], X(2) = -1/2.
ModelSpec pure_delay();

/// Replaces the delays of `base` by tau_1, ..., tau_n. The drift and diffusion
/// of `base` must accept the resulting (n+1)-component states. Delays are
/// checked to stay in (0, tau] on [0, horizon].
ModelSpec build_multi_delay(const ModelSpec& base, std::vector<Delay> delays, double horizon);

/// b = -a (1/(n+1)) sum_i x_{-i}, sigma = s I, V = |x|^2.
ModelSpec averaged_reversion_model(double a, double sigma, double tau, int n_delays, int dim = 1);

}  // namespace mvsdde
