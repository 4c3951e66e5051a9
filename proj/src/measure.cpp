#include "mvsdde/measure.hpp"

#include <algorithm>
#include <cmath>

#include "mvsdde/assignment.hpp"
#include "mvsdde/error.hpp"
#include "mvsdde/parallel.hpp"

namespace mvsdde {

EmpiricalMeasure::EmpiricalMeasure(int n_delays, int dim, Eigen::MatrixXd atoms)
    : n_(n_delays), d_(dim), atoms_(std::move(atoms)) {
  if (atoms_.cols() < 1) throw InvalidArgument("EmpiricalMeasure: needs at least one atom");
  if (atoms_.rows() != (n_ + 1) * d_) throw InvalidArgument("EmpiricalMeasure: atom length is not (n+1)*d");
}

EmpiricalMeasure EmpiricalMeasure::from_states(const std::vector<DelayedState>& states) {
  if (states.empty()) throw InvalidArgument("EmpiricalMeasure: needs at least one atom");
  const auto& first = states.front();
  Eigen::MatrixXd atoms(first.data().size(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (!states[j].same_shape(first)) throw InvalidArgument("EmpiricalMeasure: atoms differ in shape");
    atoms.col(static_cast<Eigen::Index>(j)) = states[j].data();
  }
  return EmpiricalMeasure(first.n_delays(), first.dim(), std::move(atoms));
}

DelayedState EmpiricalMeasure::atom(std::size_t j) const {
  return DelayedState(n_, d_, atoms_.col(static_cast<Eigen::Index>(j)));
}

MeasureFlow::MeasureFlow(TimeGrid grid, std::vector<EmpiricalMeasure> measures)
    : grid_(grid), measures_(std::move(measures)) {
  if (measures_.size() != static_cast<std::size_t>(grid_.steps() + 1))
    throw InvalidArgument("MeasureFlow: need one measure per grid time in [0, T]");
  for (const auto& m : measures_)
    if (!m.same_shape(measures_.front())) throw InvalidArgument("MeasureFlow: measures differ in shape");
}

MeasureFlow MeasureFlow::constant(const TimeGrid& grid, const EmpiricalMeasure& mu0) {
  return MeasureFlow(grid, std::vector<EmpiricalMeasure>(static_cast<std::size_t>(grid.steps() + 1), mu0));
}

const EmpiricalMeasure& MeasureFlow::at_time(double t) const {
  const double pos = t / grid_.step();
  int k = static_cast<int>(std::floor(pos + 1e-9 * std::max(1.0, std::abs(pos))));
  k = std::clamp(k, 0, grid_.steps());
  return measures_[static_cast<std::size_t>(k)];
}

double mu_of_V(const EmpiricalMeasure& mu, const LyapunovSpec& v) {
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (int i = 0; i <= mu.n_delays(); ++i) total += v(mu.lag(j, i));
  return total / static_cast<double>(mu.size());
}

double transport_cost(const DelayedState& x, const DelayedState& y, const PsiSpec& psi, const LyapunovSpec& v) {
  return psi(eval_norm(x, y)) * (1.0 + v.joint(x) + v.joint(y));
}

namespace {

std::vector<double> atom_weights(const EmpiricalMeasure& mu, const LyapunovSpec& v) {
  std::vector<double> w(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double s = 0.0;
    for (int i = 0; i <= mu.n_delays(); ++i) s += v(mu.lag(j, i));
    w[j] = s;
  }
  return w;
}

}  // namespace

double wasserstein_psi_v(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PsiSpec& psi,
                         const LyapunovSpec& v) {
  if (mu.size() != nu.size())
    throw InvalidArgument("wasserstein_psi_v: measures have different atom counts (" + std::to_string(mu.size()) +
                          " vs " + std::to_string(nu.size()) + ")");
  if (mu.n_delays() != nu.n_delays() || mu.dim() != nu.dim())
    throw InvalidArgument("wasserstein_psi_v: measures live on different state spaces");
  const auto n = static_cast<Eigen::Index>(mu.size());
  const int comps = mu.n_delays() + 1;
  const int d = mu.dim();
  const std::vector<double> wx = atom_weights(mu, v);
  const std::vector<double> wy = atom_weights(nu, v);
  const Eigen::MatrixXd& a = mu.atoms();
  const Eigen::MatrixXd& b = nu.atoms();

  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double norm = 0.0;
      if (d == 1) {
        for (int c = 0; c < comps; ++c) norm += std::abs(a(c, i) - b(c, j));
      } else {
        for (int c = 0; c < comps; ++c)
          norm += (a.col(i).segment(c * d, d) - b.col(j).segment(c * d, d)).norm();
      }
      norm /= comps;
      cost(i, j) = psi(norm) * (1.0 + wx[static_cast<std::size_t>(i)] + wy[static_cast<std::size_t>(j)]);
    }
  }
  return solve_assignment(cost).total_cost / static_cast<double>(n);
}

std::vector<double> flow_distance_profile(const MeasureFlow& mu, const MeasureFlow& nu, const PsiSpec& psi,
                                          const LyapunovSpec& v) {
  if (!(mu.grid() == nu.grid())) throw InvalidArgument("flow distance: flows live on different grids");
  if (!mu.at(0).same_shape(nu.at(0))) throw InvalidArgument("flow distance: flows differ in atom count or shape");
  std::vector<double> profile(mu.size());
  detail::parallel_for(mu.size(), [&](std::size_t k) {
    profile[k] = wasserstein_psi_v(mu.at(static_cast<int>(k)), nu.at(static_cast<int>(k)), psi, v);
  });
  return profile;
}

double discounted_sup(const std::vector<double>& profile, const TimeGrid& grid, double lambda) {
  double best = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k)
    best = std::max(best, std::exp(-lambda * grid.time(static_cast<int>(k))) * profile[k]);
  return best;
}

double flow_distance_lambda(const MeasureFlow& mu, const MeasureFlow& nu, double lambda, const PsiSpec& psi,
                            const LyapunovSpec& v) {
  if (lambda < 0.0) throw InvalidArgument("flow distance: lambda must be >= 0");
  return discounted_sup(flow_distance_profile(mu, nu, psi, v), mu.grid(), lambda);
}

EmpiricalMeasure empirical_from_ensemble(const std::vector<ParticlePath>& paths, double t, const ModelSpec& model) {
  if (paths.empty()) throw InvalidArgument("empirical_from_ensemble: no paths");
  const auto& grid = paths.front().grid();
  if (t < -1e-12 || t > grid.horizon() * (1.0 + 1e-12))
    throw InvalidArgument("empirical_from_ensemble: t outside [0, T]");
  Eigen::MatrixXd atoms((model.n_delays() + 1) * model.dim, static_cast<Eigen::Index>(paths.size()));
  for (std::size_t j = 0; j < paths.size(); ++j)
    atoms.col(static_cast<Eigen::Index>(j)) = joint_state(paths[j], t, model).data();
  return EmpiricalMeasure(model.n_delays(), model.dim, std::move(atoms));
}

MeasureFlow flow_from_ensemble(const std::vector<ParticlePath>& paths, const ModelSpec& model) {
  if (paths.empty()) throw InvalidArgument("flow_from_ensemble: no paths");
  const auto& grid = paths.front().grid();
  std::vector<EmpiricalMeasure> measures;
  measures.reserve(static_cast<std::size_t>(grid.steps() + 1));
  for (int k = 0; k <= grid.steps(); ++k) measures.push_back(empirical_from_ensemble(paths, grid.time(k), model));
  return MeasureFlow(grid, std::move(measures));
}

}  // namespace mvsdde
