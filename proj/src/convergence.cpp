#include "mvsdde/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "mvsdde/error.hpp"
#include "mvsdde/parallel.hpp"
#include "mvsdde/particle.hpp"
#include "mvsdde/solver.hpp"

namespace mvsdde {

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("regression_slope: need two or more points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

StrongOrderStudy strong_order_study(const ModelSpec& model, double horizon, const std::vector<int>& steps_per_delay,
                                    int refinement, std::size_t paths, std::uint64_t seed) {
  if (!model.measure_free) throw InvalidArgument("strong_order_study: the model must not depend on the measure");
  if (steps_per_delay.size() < 2) throw InvalidArgument("strong_order_study: need at least two step sizes");
  if (refinement < 2 || paths < 1) throw InvalidArgument("strong_order_study: need refinement >= 2 and paths >= 1");
  const int finest = *std::max_element(steps_per_delay.begin(), steps_per_delay.end());
  const int ref_m = finest * refinement;
  for (int m : steps_per_delay)
    if (m < 1 || ref_m % m != 0) throw InvalidArgument("strong_order_study: levels must divide the reference level");

  const TimeGrid ref_grid = make_grid(model.tau, horizon, ref_m);
  std::vector<TimeGrid> grids;
  for (int m : steps_per_delay) grids.push_back(make_grid(model.tau, horizon, m));
  check_compatible(model, ref_grid);

  // Placeholder flows: the drift never reads them.
  const EmpiricalMeasure dummy = EmpiricalMeasure::dirac(DelayedState(model.n_delays(), model.dim));
  const MeasureFlow ref_flow = MeasureFlow::constant(ref_grid, dummy);
  std::vector<MeasureFlow> flows;
  for (const auto& g : grids) flows.push_back(MeasureFlow::constant(g, dummy));

  std::vector<std::vector<double>> sq_err(paths, std::vector<double>(grids.size()));
  detail::parallel_for(paths, [&](std::size_t i) {
    const Eigen::MatrixXd fine = sample_increments(NoiseStream{seed, i, model.dim, StreamKind::kBrownian}, ref_grid);
    const ParticlePath ref = solve_frozen(model, ref_flow, fine, ref_grid, seed, i);
    const Eigen::VectorXd ref_end = ref.at(ref_grid.steps());
    for (std::size_t l = 0; l < grids.size(); ++l) {
      const int ratio = ref_m / grids[l].steps_per_delay();
      Eigen::MatrixXd coarse(model.dim, grids[l].steps());
      for (int k = 0; k < grids[l].steps(); ++k) coarse.col(k) = fine.middleCols(k * ratio, ratio).rowwise().sum();
      const ParticlePath p = solve_frozen(model, flows[l], coarse, grids[l], seed, i);
      sq_err[i][l] = (p.at(grids[l].steps()) - ref_end).squaredNorm();
    }
  });

  StrongOrderStudy study;
  study.reference_steps_per_delay = ref_m;
  std::vector<double> log_h, log_e;
  for (std::size_t l = 0; l < grids.size(); ++l) {
    double total = 0.0;
    for (std::size_t i = 0; i < paths; ++i) total += sq_err[i][l];
    const double rms = std::sqrt(total / static_cast<double>(paths));
    study.rows.push_back({grids[l].steps_per_delay(), grids[l].step(), rms});
    log_h.push_back(std::log2(grids[l].step()));
    log_e.push_back(std::log2(rms));
  }
  study.order = regression_slope(log_h, log_e);
  return study;
}

std::uint64_t independent_seed(std::uint64_t seed) { return seed ^ 0xD1B54A32D192ED03ULL; }

double wasserstein_1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return wasserstein_psi_v(mu, nu, identity_psi(), zero_lyapunov());
}

ChaosSample particle_vs_fixpoint(const ModelSpec& model, const TimeGrid& grid, std::size_t particles,
                                 std::uint64_t seed, const PicardOptions& options) {
  const PicardReport report = picard_iterate(model, seed, particles, grid, options);
  const auto paths = simulate_particles(model, independent_seed(seed), particles, grid);
  const EmpiricalMeasure terminal = empirical_from_ensemble(paths, grid.horizon(), model);
  ChaosSample s;
  s.particles = particles;
  s.seed = seed;
  s.w1 = wasserstein_1(report.final_flow.at(grid.steps()), terminal);
  s.picard_converged = report.converged;
  s.picard_iterations = report.iterations;
  return s;
}

}  // namespace mvsdde
