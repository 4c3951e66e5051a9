#include "mvsdde/models.hpp"

#include <algorithm>
#include <cmath>

#include "mvsdde/error.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

InteractionKernel bump_kernel(double height, double radius) {
  if (!(radius > 0.0) || height < 0.0) throw InvalidArgument("bump kernel: need radius > 0 and height >= 0");
  return {"bump",
          [height, radius](double r) {
            const double u = r / radius;
            if (u >= 1.0) return 0.0;
            const double w = 1.0 - u * u;
            return height * w * w;
          },
          height, 8.0 * height / (3.0 * std::sqrt(3.0) * radius), radius};
}

InteractionKernel tent_kernel(double height, double radius) {
  if (!(radius > 0.0) || height < 0.0) throw InvalidArgument("tent kernel: need radius > 0 and height >= 0");
  return {"tent", [height, radius](double r) { return r >= radius ? 0.0 : height * (1.0 - r / radius); }, height,
          height / radius, radius};
}

InteractionKernel zero_kernel() {
  return {"zero", [](double) { return 0.0; }, 0.0, 0.0, 0.0};
}

Reversion linear_reversion(double rate, double target) {
  return {[rate, target](double x) { return -rate * (x - target); }, std::abs(rate), rate * target};
}

double OpinionParams::kernel_norm() const { return std::max(kernel_delayed.sup, kernel_current.sup); }
double OpinionParams::kernel_lipschitz() const { return std::max(kernel_delayed.lipschitz, kernel_current.lipschitz); }
double OpinionParams::kernel_support() const { return std::max(kernel_delayed.support, kernel_current.support); }
double OpinionParams::reversion_lipschitz() const {
  return std::max(reversion_delayed.lipschitz, reversion_current.lipschitz);
}

namespace {

double kernel_average(const InteractionKernel& kernel, double x, const auto& atoms) {
  double total = 0.0;
  const Eigen::Index n = atoms.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double diff = x - atoms(0, j);
    total += kernel.phi(std::abs(diff)) * diff;
  }
  return total / static_cast<double>(n);
}

}  // namespace

double opinion_drift(const DelayedState& x, const EmpiricalMeasure& mu, const OpinionParams& params) {
  if (x.dim() != 1 || mu.dim() != 1) throw InvalidArgument("opinion_drift: the opinion model is scalar (d = 1)");
  if (x.n_delays() != 1 || mu.n_delays() != 1) throw InvalidArgument("opinion_drift: the opinion model has one delay");
  const double delayed = x.lag(1)(0);
  const double current = x.lag(0)(0);
  return kernel_average(params.kernel_delayed, delayed, mu.marginal(1)) + params.reversion_delayed.fn(delayed) +
         kernel_average(params.kernel_current, current, mu.marginal(0)) + params.reversion_current.fn(current);
}

OpinionConstants opinion_constants(double kernel_norm, double kernel_lipschitz, double support, double reversion_lipschitz,
                                   double phi0_at_zero, double phim1_at_zero, double sigma) {
  OpinionConstants c;
  const double b = reversion_lipschitz;
  c.A = 2.0 * std::max(kernel_norm, kernel_lipschitz * support);
  c.K = 2.0 * std::max(c.A, b);
  c.theta = c.A;
  const double noise_part = phi0_at_zero * phi0_at_zero + phim1_at_zero * phim1_at_zero + sigma * sigma;
  c.zeta = std::max(6.0 + kernel_norm / 2.0 + 2.0 * b * b, noise_part);
  c.zeta_squared_norm = std::max(6.0 + kernel_norm * kernel_norm / 2.0 + 2.0 * b * b, noise_part);
  return c;
}

OpinionConstants opinion_constants(const OpinionParams& params) {
  return opinion_constants(params.kernel_norm(), params.kernel_lipschitz(), params.kernel_support(),
                           params.reversion_lipschitz(), params.reversion_current.at_zero,
                           params.reversion_delayed.at_zero, params.sigma);
}

InitialSegmentFn gaussian_constant_segment(int dim, double mean, double std_dev) {
  return [dim, mean, std_dev](std::uint64_t seed, std::size_t particle, double) {
    CounterRng rng(seed, particle, StreamKind::kInitial);
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x(j) = mean + std_dev * rng.normal();
    return x;
  };
}

InitialSegmentFn constant_segment(Eigen::VectorXd value) {
  return [value = std::move(value)](std::uint64_t, std::size_t, double) { return value; };
}

ModelSpec opinion_model(const OpinionParams& params) {
  if (!(params.tau > 0.0)) throw InvalidArgument("opinion model: tau must be positive");
  const OpinionConstants c = opinion_constants(params);
  ModelSpec m;
  m.name = "opinion";
  m.dim = 1;
  m.tau = params.tau;
  m.delays = {constant_delay(params.tau)};
  m.drift = [params](const DelayedState& x, const EmpiricalMeasure& mu) {
    return Eigen::VectorXd::Constant(1, opinion_drift(x, mu, params));
  };
  const double sigma = params.sigma;
  m.diffusion = [sigma](const DelayedState&) { return Eigen::MatrixXd::Constant(1, 1, sigma); };
  m.lyapunov = quadratic_lyapunov();
  m.lyapunov.zeta = c.zeta;
  m.psi = identity_psi();
  m.initial_segment = gaussian_constant_segment(1, params.init_mean, params.init_std);
  m.lipschitz_K = c.K;
  m.measure_lipschitz_theta = c.theta;
  m.measure_free = params.kernel_norm() == 0.0;
  return m;
}

ModelSpec delayed_ou(double a, double c, double sigma, double tau, int dim) {
  if (!std::isfinite(a) || !std::isfinite(c) || !std::isfinite(sigma))
    throw InvalidArgument("delayed_ou: coefficients must be finite");
  ModelSpec m;
  m.name = "delayed_ou";
  m.dim = dim;
  m.tau = tau;
  m.delays = {constant_delay(tau)};
  m.drift = [a, c](const DelayedState& x, const EmpiricalMeasure&) -> Eigen::VectorXd {
    return -a * x.lag(0) - c * x.lag(1);
  };
  m.diffusion = [sigma, dim](const DelayedState&) -> Eigen::MatrixXd {
    return sigma * Eigen::MatrixXd::Identity(dim, dim);
  };
  m.lyapunov = quadratic_lyapunov();
  m.lyapunov.zeta = std::max({2.0 * std::max(-a, 0.0) + std::abs(c), dim * sigma * sigma, std::abs(sigma)});
  m.psi = identity_psi();
  m.initial_segment = constant_segment(Eigen::VectorXd::Ones(dim));
  m.lipschitz_K = 2.0 * std::max({-a, std::abs(c), 0.0});
  m.measure_lipschitz_theta = 0.0;
  m.measure_free = true;
  return m;
}

ModelSpec pure_delay() {
  ModelSpec m = delayed_ou(0.0, 1.0, 0.0, 1.0);
  m.name = "pure_delay";
  return m;
}

ModelSpec build_multi_delay(const ModelSpec& base, std::vector<Delay> delays, double horizon) {
  if (delays.empty()) throw InvalidArgument("build_multi_delay: need at least one delay");
  ModelSpec m = base;
  m.delays = std::move(delays);
  validate_model(m, horizon);
  return m;
}

ModelSpec averaged_reversion_model(double a, double sigma, double tau, int n_delays, int dim) {
  if (n_delays < 1) throw InvalidArgument("averaged_reversion_model: need at least one delay");
  ModelSpec m;
  m.name = "multi_delay";
  m.dim = dim;
  m.tau = tau;
  for (int i = 1; i <= n_delays; ++i) m.delays.push_back(constant_delay(tau * i / n_delays));
  m.drift = [a](const DelayedState& x, const EmpiricalMeasure&) -> Eigen::VectorXd {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(x.dim());
    for (int i = 0; i <= x.n_delays(); ++i) avg += x.lag(i);
    return -a * avg / (x.n_delays() + 1);
  };
  m.diffusion = [sigma, dim](const DelayedState&) -> Eigen::MatrixXd {
    return sigma * Eigen::MatrixXd::Identity(dim, dim);
  };
  m.lyapunov = quadratic_lyapunov();
  m.lyapunov.zeta = std::max({2.0 * std::abs(a), dim * sigma * sigma, std::abs(sigma)});
  m.psi = identity_psi();
  m.initial_segment = constant_segment(Eigen::VectorXd::Ones(dim));
  m.lipschitz_K = std::abs(a);
  m.measure_lipschitz_theta = 0.0;
  m.measure_free = true;
  return m;
}

}  // namespace mvsdde
