#include "mvsdde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvsdde/error.hpp"
#include "mvsdde/fixedpoint.hpp"
#include "mvsdde/parallel.hpp"
#include "mvsdde/solver.hpp"

namespace mvsdde {
namespace {

double slack(double rhs) { return 1e-10 * (1.0 + std::abs(rhs)); }

void require_samples(const std::vector<EmpiricalMeasure>& measures) {
  if (measures.empty()) throw InvalidArgument("probe: need at least one sample measure");
}

}  // namespace

LyapunovProbe check_lyapunov(const ModelSpec& model, const std::vector<DelayedState>& points,
                             const std::vector<EmpiricalMeasure>& measures, std::optional<double> declared_zeta) {
  require_samples(measures);
  const auto& v = model.lyapunov;
  std::vector<double> measure_V(measures.size());
  for (std::size_t j = 0; j < measures.size(); ++j) measure_V[j] = mu_of_V(measures[j], v);

  struct Sample {
    double generator_lhs, generator_rhs, diffusion_lhs, diffusion_rhs;
  };
  std::vector<Sample> samples(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) {
    const DelayedState& x = points[i];
    const std::size_t j = i % measures.size();
    const Eigen::VectorXd x0 = x.current();
    const Eigen::MatrixXd sigma = model.diffusion(x);
    samples[i] = {eval_generator(x, measures[j], model), 1.0 + measure_V[j] + v.joint(x),
                  (sigma.transpose() * v.gradient(x0)).norm(), 1.0 + v(x0)};
  });

  LyapunovProbe out;
  out.report.samples = points.size();
  out.report.checked_declared = declared_zeta.has_value();
  out.report.worst_violation = declared_zeta ? -std::numeric_limits<double>::infinity() : 0.0;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const double gen_ratio = s.generator_lhs / s.generator_rhs;
    const double diff_ratio = s.diffusion_lhs / s.diffusion_rhs;
    out.generator_constant = std::max(out.generator_constant, gen_ratio);
    out.diffusion_constant = std::max(out.diffusion_constant, diff_ratio);

    const bool generator_side = gen_ratio >= diff_ratio;
    const double lhs = generator_side ? s.generator_lhs : s.diffusion_lhs;
    const double unit_rhs = generator_side ? s.generator_rhs : s.diffusion_rhs;
    double score;
    if (declared_zeta) {
      const double violation = std::max(s.generator_lhs - *declared_zeta * s.generator_rhs - slack(*declared_zeta * s.generator_rhs),
                                         s.diffusion_lhs - *declared_zeta * s.diffusion_rhs - slack(*declared_zeta * s.diffusion_rhs));
      out.report.worst_violation = std::max(out.report.worst_violation, violation);
      score = violation;
    } else {
      score = std::max(gen_ratio, diff_ratio);
    }
    if (score > worst_ratio) {
      worst_ratio = score;
      out.report.witness = ProbeWitness{i, points[i], std::nullopt, i % measures.size(), lhs,
                                        declared_zeta.value_or(1.0) * unit_rhs};
    }
  }
  out.report.estimated_constant = std::max(out.generator_constant, out.diffusion_constant);
  return out;
}

MeasurePair make_measure_pair(const ModelSpec& model, EmpiricalMeasure mu, EmpiricalMeasure nu) {
  const double w = wasserstein_psi_v(mu, nu, model.psi, model.lyapunov);
  return {std::move(mu), std::move(nu), w};
}

ProbeReport check_lipschitz(const ModelSpec& model, const std::vector<std::pair<DelayedState, DelayedState>>& pairs,
                            const std::vector<MeasurePair>& measure_pairs, std::optional<double> declared_K,
                            std::optional<double> declared_theta) {
  if (measure_pairs.empty()) throw InvalidArgument("check_lipschitz: need at least one measure pair");
  struct Sample {
    double lhs, dx0, norm, w;
  };
  std::vector<Sample> samples(pairs.size());
  detail::parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const MeasurePair& mp = measure_pairs[i % measure_pairs.size()];
    const Eigen::VectorXd dx0 = x.current() - y.current();
    const Eigen::VectorXd db = model.drift(x, mp.mu) - model.drift(y, mp.nu);
    const double frob = (model.diffusion(x) - model.diffusion(y)).squaredNorm();
    samples[i] = {std::max(dx0.dot(db), 0.0) + 0.5 * frob, dx0.norm(), eval_norm(x, y), mp.distance};
  });

  ProbeReport report;
  report.samples = pairs.size();
  const bool declared = declared_K.has_value() && declared_theta.has_value();
  report.checked_declared = declared;

  std::vector<std::size_t> informative;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].dx0 > 0.0) informative.push_back(i);
  if (informative.empty()) {
    report.inconclusive = true;
    return report;
  }

  // (K, theta) estimate: for each theta the least admissible K, keep min K + theta.
  std::vector<double> thetas{0.0};
  for (int j = -40; j <= 40; ++j) thetas.push_back(std::pow(2.0, j / 4.0));
  double best_sum = std::numeric_limits<double>::infinity();
  for (double theta : thetas) {
    double k_needed = 0.0;
    for (std::size_t i : informative) {
      const Sample& s = samples[i];
      const double excess = s.lhs / s.dx0 - theta * s.w;
      if (excess > 0.0) k_needed = std::max(k_needed, s.norm > 0.0 ? excess / s.norm : std::numeric_limits<double>::infinity());
    }
    if (k_needed + theta < best_sum) {
      best_sum = k_needed + theta;
      report.estimated_constant = k_needed;
      report.estimated_secondary = theta;
    }
  }

  const double K = declared_K.value_or(report.estimated_constant);
  const double theta = declared_theta.value_or(report.estimated_secondary.value_or(0.0));
  report.worst_violation = declared ? -std::numeric_limits<double>::infinity() : 0.0;
  double worst_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i : informative) {
    const Sample& s = samples[i];
    const double rhs = s.dx0 * (K * s.norm + theta * s.w);
    const double score = s.lhs - rhs - slack(rhs);
    if (declared) report.worst_violation = std::max(report.worst_violation, score);
    if (score > worst_score) {
      worst_score = score;
      report.witness = ProbeWitness{i, pairs[i].first, pairs[i].second, i % measure_pairs.size(), s.lhs, rhs};
    }
  }
  return report;
}

std::vector<DelayedState> uniform_probe_points(const ModelSpec& model, std::size_t count, double half_width,
                                               std::uint64_t seed) {
  CounterRng rng(seed, 0, StreamKind::kProbe);
  std::vector<DelayedState> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DelayedState x(model.n_delays(), model.dim);
    for (Eigen::Index c = 0; c < x.data().size(); ++c) x.data()(c) = half_width * (2.0 * rng.uniform() - 1.0);
    points.push_back(std::move(x));
  }
  return points;
}

std::vector<std::pair<DelayedState, DelayedState>> probe_pairs(const ModelSpec& model, std::size_t count,
                                                               double half_width, std::uint64_t seed) {
  CounterRng rng(seed, 1, StreamKind::kProbe);
  constexpr double kScales[] = {1e-3, 1e-2, 1e-1, 1.0};
  std::vector<std::pair<DelayedState, DelayedState>> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    DelayedState x(model.n_delays(), model.dim);
    for (Eigen::Index c = 0; c < x.data().size(); ++c) x.data()(c) = half_width * (2.0 * rng.uniform() - 1.0);
    DelayedState y = x;
    if (pairs.size() % 4 == 0) {
      for (Eigen::Index c = 0; c < y.data().size(); ++c) y.data()(c) = half_width * (2.0 * rng.uniform() - 1.0);
    } else {
      // Per-component perturbation sizes chosen independently, so some
      // pairs differ mostly in the delayed part and others in the current one.
      for (int lag = 0; lag <= model.n_delays(); ++lag) {
        const double scale = kScales[static_cast<std::size_t>(rng() % 4)];
        for (int j = 0; j < model.dim; ++j) y.lag(lag)(j) += scale * (2.0 * rng.uniform() - 1.0);
      }
    }
    if ((x.current() - y.current()).norm() > 0.0) pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

std::vector<EmpiricalMeasure> random_measures(const ModelSpec& model, std::size_t count, std::size_t atoms,
                                              double half_width, std::uint64_t seed) {
  CounterRng rng(seed, 2, StreamKind::kProbe);
  const int rows = (model.n_delays() + 1) * model.dim;
  std::vector<EmpiricalMeasure> out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    // A cluster with random centre and log-uniform spread, so that some
    // measures are nearly Dirac.
    const double centre = half_width * (2.0 * rng.uniform() - 1.0);
    const double spread = half_width * std::pow(1e-3, rng.uniform());
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(atoms));
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (int r = 0; r < rows; ++r)
        a(r, j) = std::clamp(centre + spread * (2.0 * rng.uniform() - 1.0), -half_width, half_width);
    out.emplace_back(model.n_delays(), model.dim, std::move(a));
  }
  return out;
}

double moment_bound_formula(double expected_V0, double zeta, double horizon, double expected_xi_norm, int n_delays) {
  if (n_delays <= 1)
    return (expected_V0 + zeta * horizon + 2.0 * zeta * expected_xi_norm) * std::exp(4.0 * zeta * horizon);
  return (expected_V0 + zeta * horizon + 2.0 * (n_delays - 1) * zeta * expected_xi_norm) *
         std::exp(2.0 * n_delays * zeta * horizon);
}

MomentBound moment_bound(const ModelSpec& model, const std::vector<ParticlePath>& ensemble) {
  if (ensemble.empty()) throw InvalidArgument("moment_bound: empty ensemble");
  if (!model.lyapunov.zeta) throw InvalidArgument("moment_bound: the model declares no zeta");
  const TimeGrid& grid = ensemble.front().grid();
  const auto n = static_cast<double>(ensemble.size());
  const auto& v = model.lyapunov;

  MomentBound out;
  out.observed = -1.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& path : ensemble) {
      const double value = v(path.at(k));
      sum += value;
      sum_sq += value * value;
    }
    const double mean = sum / n;
    if (k == 0) out.expected_V0 = mean;
    if (mean > out.observed) {
      out.observed = mean;
      out.argmax_time = grid.time(k);
      const double var = ensemble.size() > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
      out.observed_se = std::sqrt(var / n);
    }
  }
  double xi = 0.0;
  for (const auto& path : ensemble) {
    double sup = 0.0;
    for (int k = -grid.steps_per_delay(); k <= 0; ++k) sup = std::max(sup, v(path.at(k)));
    xi += sup;
  }
  out.expected_xi_norm = xi / n;
  out.bound = moment_bound_formula(out.expected_V0, *model.lyapunov.zeta, grid.horizon(), out.expected_xi_norm,
                                   model.n_delays());
  return out;
}

double gn_threshold(int n) {
  if (n < 0) throw InvalidArgument("gn_threshold: n must be >= 0");
  return std::exp(-0.5 * n * (n + 1.0));
}

GnValue gn_eval(int n, double r) {
  if (n < 1) throw InvalidArgument("gn_eval: n must be >= 1");
  const double lo = gn_threshold(n);
  const double hi = gn_threshold(n - 1);
  const double a = std::abs(r);
  const double sign = r < 0.0 ? -1.0 : 1.0;
  GnValue out;
  if (a <= lo) return out;
  if (a < hi) {
    out.g = (a * std::log(a / lo) - a + lo) / n;
    out.dg = sign * std::log(a / lo) / n;
    out.d2g = 1.0 / (n * a);
    return out;
  }
  const double g_hi = hi - (hi - lo) / n;
  out.g = g_hi + (a - hi);
  out.dg = sign;
  return out;
}

RadialReport radial_check(const ModelSpec& model, const MeasureFlow& flow_mu, const MeasureFlow& flow_nu,
                          std::uint64_t seed, std::size_t particles, const TimeGrid& grid) {
  if (!(flow_mu.grid() == grid) || !(flow_nu.grid() == grid))
    throw InvalidArgument("radial_check: flows must live on the simulation grid");
  if (!flow_mu.at(0).same_shape(flow_nu.at(0)))
    throw InvalidArgument("radial_check: flows differ in atom count or shape");
  if (!model.lipschitz_K || !model.measure_lipschitz_theta)
    throw InvalidArgument("radial_check: the model must declare K and theta");

  RadialReport report;
  report.K = *model.lipschitz_K;
  report.theta = *model.measure_lipschitz_theta;
  const NoiseBank noise(seed, particles, grid, model.dim);
  const auto paths_mu = solve_ensemble_frozen(model, flow_mu, noise, grid);
  const auto paths_nu = solve_ensemble_frozen(model, flow_nu, noise, grid);
  const std::vector<double> w = flow_distance_profile(flow_mu, flow_nu, model.psi, model.lyapunov);
  const double h = grid.step();
  const auto n = static_cast<double>(particles);

  // Per particle: running K h sum_{j<k} ||Z_j|| and |Z(0)|.
  std::vector<double> integral(particles, 0.0), z0(particles);
  for (std::size_t i = 0; i < particles; ++i) z0[i] = (paths_mu[i].at(0) - paths_nu[i].at(0)).norm();
  double w_integral = 0.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    double sum_d = 0.0, sum_d2 = 0.0, sum_z = 0.0, sum_z0 = 0.0, sum_int = 0.0;
    for (std::size_t i = 0; i < particles; ++i) {
      const double z = (paths_mu[i].at(k) - paths_nu[i].at(k)).norm();
      const double d = z - z0[i] - integral[i];
      sum_d += d;
      sum_d2 += d * d;
      sum_z += z;
      sum_z0 += z0[i];
      sum_int += integral[i];
    }
    const double mean_d = sum_d / n;
    const double var = particles > 1 ? std::max(0.0, (sum_d2 - n * mean_d * mean_d) / (n - 1.0)) : 0.0;
    RadialRow row;
    row.t = t;
    row.lhs = sum_z / n;
    row.rhs = sum_z0 / n + sum_int / n + report.theta * w_integral;
    row.se = std::sqrt(var / n);
    row.ok = row.lhs <= row.rhs + 3.0 * row.se + 1e-12 * (1.0 + row.rhs);
    report.passed = report.passed && row.ok;
    report.rows.push_back(row);

    if (k == grid.steps()) break;
    for (std::size_t i = 0; i < particles; ++i) {
      const DelayedState xm = joint_state(paths_mu[i], t, model);
      const DelayedState xn = joint_state(paths_nu[i], t, model);
      integral[i] += h * report.K * eval_norm(xm, xn);
    }
    w_integral += h * w[static_cast<std::size_t>(k)];
  }
  return report;
}

}  // namespace mvsdde
