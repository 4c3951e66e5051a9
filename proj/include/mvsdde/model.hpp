#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvsdde/delayed_state.hpp"
#include "mvsdde/path.hpp"

namespace mvsdde {

class EmpiricalMeasure;

/// Lyapunov function V with analytic derivatives and the constants of the
/// growth condition c1 |x|^p <= V(x) <= c2 |x|^p.
struct LyapunovSpec {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  double p = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
  /// Declared constant of the generator bound; absent for undeclared models.
  std::optional<double> zeta;

  double operator()(const Eigen::VectorXd& x) const { return value(x); }
  /// Sum of V over all components of a joint state.
  double joint(const DelayedState& x) const;
};

/// V(x) = |x|^2.
LyapunovSpec quadratic_lyapunov();
/// V = 0; only meaningful as the weight of a transport cost.
LyapunovSpec zero_lyapunov();

/// Central finite differences of V, relative step 1e-5. Diagnostics only.
Eigen::VectorXd fd_gradient(const LyapunovSpec& v, const Eigen::VectorXd& x);
Eigen::MatrixXd fd_hessian(const LyapunovSpec& v, const Eigen::VectorXd& x);

/// Increasing psi on R+ with psi(0) = 0.
struct PsiSpec {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  double operator()(double r) const { return value(r); }
};

PsiSpec identity_psi();
/// psi(r) = r + r^2 / 2.
PsiSpec quadratic_psi();
/// Lookup by name: "identity" or "quadratic".
PsiSpec psi_by_name(const std::string& name);
/// Lookup by name: "zero" or "quadratic".
LyapunovSpec lyapunov_by_name(const std::string& name);

/// Deterministic delay t -> tau_i(t) with values in (0, tau].
struct Delay {
  std::function<double(double)> fn;
  std::optional<double> constant;

  double operator()(double t) const { return constant ? *constant : fn(t); }
};

Delay constant_delay(double value);
Delay varying_delay(std::function<double(double)> fn);

using DriftFn = std::function<Eigen::VectorXd(const DelayedState&, const EmpiricalMeasure&)>;
using DiffusionFn = std::function<Eigen::MatrixXd(const DelayedState&)>;
/// xi(seed, particle, t) for t in [-tau, 0]. The seed lets random initial
/// segments differ between independent ensembles.
using InitialSegmentFn = std::function<Eigen::VectorXd(std::uint64_t, std::size_t, double)>;

/// Problem data of a McKean-Vlasov delay equation
///   dX = b(X(t-tau_n(t)), ..., X(t), mu_t) dt + sigma(...) dW.
struct ModelSpec {
  std::string name;
  int dim = 1;
  double tau = 1.0;  ///< maximal delay; length of the history segment
  std::vector<Delay> delays;
  DriftFn drift;
  DiffusionFn diffusion;
  LyapunovSpec lyapunov = quadratic_lyapunov();
  PsiSpec psi = identity_psi();
  InitialSegmentFn initial_segment;
  std::optional<double> lipschitz_K;
  std::optional<double> measure_lipschitz_theta;
  /// True when b ignores its measure argument.
  bool measure_free = false;

  int n_delays() const { return static_cast<int>(delays.size()); }
};

/// Throws InvalidArgument if the spec is incomplete or a delay leaves
/// (0, tau] at any of the probe times in [0, horizon].
void validate_model(const ModelSpec& model, double horizon);

/// Averaged L1 norm (1/(n+1)) sum_i |x_{-i} - y_{-i}|.
double eval_norm(const DelayedState& x, const DelayedState& y);

/// Generator LV(x, mu) = grad V(x_0) . b(x, mu) + 1/2 tr(sigma^T hess V(x_0) sigma).
double eval_generator(const DelayedState& x, const EmpiricalMeasure& mu, const ModelSpec& model);

/// X(t - tau_i(t)) from a stored path. Grid-aligned lookups are exact.
PathSample eval_history(const ParticlePath& path, double t, const Delay& delay);

/// Joint state (X(t - tau_n(t)), ..., X(t)) of a path at time t.
DelayedState joint_state(const ParticlePath& path, double t, const ModelSpec& model);

}  // namespace mvsdde
