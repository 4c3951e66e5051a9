#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mvsdde/delayed_state.hpp"
#include "mvsdde/model.hpp"
#include "mvsdde/path.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// Equal-weight atoms on the joint state space. Atom j is column j of a
/// ((n+1) d) x N matrix laid out like DelayedState::data().
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(int n_delays, int dim, Eigen::MatrixXd atoms);
  static EmpiricalMeasure from_states(const std::vector<DelayedState>& states);
  static EmpiricalMeasure dirac(const DelayedState& state) { return from_states({state}); }

  int n_delays() const { return n_; }
  int dim() const { return d_; }
  std::size_t size() const { return static_cast<std::size_t>(atoms_.cols()); }

  DelayedState atom(std::size_t j) const;
  /// Coordinates of lag i of atom j.
  auto lag(std::size_t j, int i) const {
    return atoms_.col(static_cast<Eigen::Index>(j)).segment((n_ - i) * d_, d_);
  }
  /// Marginal of lag i: a d x N block, one column per atom.
  auto marginal(int i) const { return atoms_.middleRows((n_ - i) * d_, d_); }

  const Eigen::MatrixXd& atoms() const { return atoms_; }

  bool same_shape(const EmpiricalMeasure& other) const {
    return n_ == other.n_ && d_ == other.d_ && size() == other.size();
  }

 private:
  int n_;
  int d_;
  Eigen::MatrixXd atoms_;
};

/// Grid-indexed measures at t_0 = 0, ..., t_K = T, piecewise constant from the
/// left in between.
class MeasureFlow {
 public:
  MeasureFlow(TimeGrid grid, std::vector<EmpiricalMeasure> measures);

  /// The flow that is mu_0 at every time.
  static MeasureFlow constant(const TimeGrid& grid, const EmpiricalMeasure& mu0);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return measures_.size(); }
  const EmpiricalMeasure& at(int k) const { return measures_[static_cast<std::size_t>(k)]; }
  /// mu_{t_k} for t in [t_k, t_{k+1}).
  const EmpiricalMeasure& at_time(double t) const;
  const std::vector<EmpiricalMeasure>& measures() const { return measures_; }

 private:
  TimeGrid grid_;
  std::vector<EmpiricalMeasure> measures_;
};

/// mu(V) = (1/N) sum over atoms of sum_i V(x_{-i}).
double mu_of_V(const EmpiricalMeasure& mu, const LyapunovSpec& v);

/// psi(||x - y||) (1 + V(x) + V(y)), V summed over components.
double transport_cost(const DelayedState& x, const DelayedState& y, const PsiSpec& psi, const LyapunovSpec& v);

/// Exact W_{psi,V} between two equal-size empirical measures, computed as an
/// optimal assignment under transport_cost.
double wasserstein_psi_v(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PsiSpec& psi,
                         const LyapunovSpec& v);

/// W_{psi,V}(mu_{t_k}, nu_{t_k}) for k = 0..K.
std::vector<double> flow_distance_profile(const MeasureFlow& mu, const MeasureFlow& nu, const PsiSpec& psi,
                                          const LyapunovSpec& v);

/// max_k e^{-lambda t_k} profile[k].
double discounted_sup(const std::vector<double>& profile, const TimeGrid& grid, double lambda);

/// W_{psi,V,lambda}(mu, nu) = max_k e^{-lambda t_k} W_{psi,V}(mu_{t_k}, nu_{t_k}).
double flow_distance_lambda(const MeasureFlow& mu, const MeasureFlow& nu, double lambda, const PsiSpec& psi,
                            const LyapunovSpec& v);

/// One atom per path: (X(t - tau_n(t)), ..., X(t)).
EmpiricalMeasure empirical_from_ensemble(const std::vector<ParticlePath>& paths, double t, const ModelSpec& model);

/// Empirical measures at every grid time in [0, T].
MeasureFlow flow_from_ensemble(const std::vector<ParticlePath>& paths, const ModelSpec& model);

}  // namespace mvsdde
