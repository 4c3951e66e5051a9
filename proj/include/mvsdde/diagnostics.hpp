#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mvsdde/measure.hpp"
#include "mvsdde/model.hpp"
#include "mvsdde/path.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// The input at which a probe was worst.
struct ProbeWitness {
  std::size_t sample = 0;
  DelayedState x;
  std::optional<DelayedState> y;
  std::size_t measure_index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ProbeReport {
  std::size_t samples = 0;
  /// zeta for the Lyapunov probe, K for the Lipschitz probe.
  double estimated_constant = 0.0;
  /// theta for the Lipschitz probe.
  std::optional<double> estimated_secondary;
  /// max over samples of lhs - rhs - slack against the declared constants;
  /// <= 0 means no violation. Zero when no constants were declared.
  double worst_violation = 0.0;
  std::optional<ProbeWitness> witness;
  bool checked_declared = false;
  bool inconclusive = false;

  bool violated() const { return worst_violation > 0.0; }
};

/// Lyapunov probe on (point, measure) samples: point i is paired with measure
/// i mod M. Estimates
///   zeta = max( LV(x, mu) / (1 + mu(V) + V(x)), |sigma^T grad V(x_0)| / (1 + V(x_0)) ).
struct LyapunovProbe {
  ProbeReport report;
  double generator_constant = 0.0;
  double diffusion_constant = 0.0;
};

LyapunovProbe check_lyapunov(const ModelSpec& model, const std::vector<DelayedState>& points,
                             const std::vector<EmpiricalMeasure>& measures,
                             std::optional<double> declared_zeta = std::nullopt);

/// A measure pair with its precomputed W_{psi,V} distance.
struct MeasurePair {
  EmpiricalMeasure mu;
  EmpiricalMeasure nu;
  double distance = 0.0;
};

MeasurePair make_measure_pair(const ModelSpec& model, EmpiricalMeasure mu, EmpiricalMeasure nu);

/// Lipschitz probe. Pair i uses measure pair i mod P. Left side
///   <x_0 - y_0, b(x,mu) - b(y,nu)>^+ + 1/2 ||sigma(x) - sigma(y)||_F^2,
/// right side |x_0 - y_0| (K ||x - y|| + theta W_{psi,V}(mu, nu)).
/// Without declared constants (K, theta) are estimated on a theta grid by
/// minimising K + theta.
ProbeReport check_lipschitz(const ModelSpec& model, const std::vector<std::pair<DelayedState, DelayedState>>& pairs,
                            const std::vector<MeasurePair>& measure_pairs, std::optional<double> declared_K = std::nullopt,
                            std::optional<double> declared_theta = std::nullopt);

/// Probe sampling: uniform points in a box, ensemble states, and pairs whose
/// components differ at mixed scales.
std::vector<DelayedState> uniform_probe_points(const ModelSpec& model, std::size_t count, double half_width,
                                               std::uint64_t seed);
std::vector<std::pair<DelayedState, DelayedState>> probe_pairs(const ModelSpec& model, std::size_t count,
                                                               double half_width, std::uint64_t seed);
/// Random atom clouds in the box, `count` measures of `atoms` atoms each.
std::vector<EmpiricalMeasure> random_measures(const ModelSpec& model, std::size_t count, std::size_t atoms,
                                              double half_width, std::uint64_t seed);

struct MomentBound {
  /// max over grid t in [0, T] of the ensemble mean of V(X(t)).
  double observed = 0.0;
  /// Standard error of the mean at the maximising time.
  double observed_se = 0.0;
  double argmax_time = 0.0;
  double bound = 0.0;
  double expected_V0 = 0.0;
  double expected_xi_norm = 0.0;
};

/// (E V(X(0)) + zeta T + 2 zeta E||xi||_V) e^{4 zeta T} for one delay;
/// (E V(X(0)) + zeta T + 2 (n-1) zeta E||xi||_V) e^{2 n zeta T} for n >= 2.
double moment_bound_formula(double expected_V0, double zeta, double horizon, double expected_xi_norm, int n_delays = 1);

/// Observed sup_t E V(X(t)) of an ensemble against the bound, with E V(X(0))
/// and E||xi||_V = E sup_u V(xi(u)) estimated from the same ensemble.
MomentBound moment_bound(const ModelSpec& model, const std::vector<ParticlePath>& ensemble);

struct GnValue {
  double g = 0.0;
  double dg = 0.0;
  double d2g = 0.0;
};

/// a_n = exp(-n(n+1)/2), so that int_{a_n}^{a_{n-1}} dx/x = n.
double gn_threshold(int n);

/// g_n(r) = int_0^{|r|} int_0^y rho_n(u) du dy with rho_n(u) = 1/(n u) on
/// (a_n, a_{n-1}) and 0 elsewhere, in closed form.
GnValue gn_eval(int n, double r);

struct RadialRow {
  double t = 0.0;
  double lhs = 0.0;  ///< E|Z(t)|
  double rhs = 0.0;  ///< E|Z(0)| + int_0^t (K E||Z(u)|| + theta W(mu_u, nu_u)) du
  double se = 0.0;   ///< standard error of the per-particle difference
  bool ok = true;
};

struct RadialReport {
  std::vector<RadialRow> rows;
  double K = 0.0;
  double theta = 0.0;
  bool passed = true;
};

/// Expectation form of the radial inequality for Z = X^mu - X^nu driven by the
/// same noise, integrals by left Riemann sums, tolerance 3 standard errors.
RadialReport radial_check(const ModelSpec& model, const MeasureFlow& flow_mu, const MeasureFlow& flow_nu,
                          std::uint64_t seed, std::size_t particles, const TimeGrid& grid);

}  // namespace mvsdde
