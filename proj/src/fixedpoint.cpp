#include "mvsdde/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvsdde/error.hpp"
#include "mvsdde/solver.hpp"

namespace mvsdde {
namespace {

constexpr int kLambdaGridSize = 40;
constexpr int kMaxMonitoredN = 1 << 20;

// log max_k e^{-lambda t_k} profile[k]; -inf when the profile vanishes.
double log_discounted_sup(const std::vector<double>& profile, const TimeGrid& grid, double lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < profile.size(); ++k)
    if (profile[k] > 0.0) best = std::max(best, std::log(profile[k]) - lambda * grid.time(static_cast<int>(k)));
  return best;
}

}  // namespace

MeasureFlow apply_H(const ModelSpec& model, const MeasureFlow& flow, const NoiseBank& noise, const TimeGrid& grid) {
  if (!(flow.grid() == grid)) throw InvalidArgument("apply_H: flow is defined on a different grid");
  return flow_from_ensemble(solve_ensemble_frozen(model, flow, noise, grid), model);
}

MeasureFlow apply_H(const ModelSpec& model, const MeasureFlow& flow, std::uint64_t seed, std::size_t particles,
                    const TimeGrid& grid) {
  return apply_H(model, flow, NoiseBank(seed, particles, grid, model.dim), grid);
}

std::vector<double> lambda_search_grid() {
  std::vector<double> grid{0.0};
  for (int j = 0; j < kLambdaGridSize; ++j) grid.push_back(std::ldexp(0.25, j));
  return grid;
}

LambdaCalibration calibrate_lambda(const std::vector<double>& previous_profile,
                                   const std::vector<double>& next_profile, const TimeGrid& grid) {
  if (previous_profile.size() != next_profile.size() ||
      previous_profile.size() != static_cast<std::size_t>(grid.steps() + 1))
    throw InvalidArgument("calibrate_lambda: profiles must have one entry per grid time in [0, T]");
  LambdaCalibration out;
  const bool prev_zero = std::all_of(previous_profile.begin(), previous_profile.end(), [](double d) { return d <= 0.0; });
  if (prev_zero) {
    out.exact_fixed_point = true;
    out.achieved = true;
    return out;
  }
  // Without success, report the smallest lambda attaining the smallest ratio.
  out.ratio = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_search_grid()) {
    const double log_next = log_discounted_sup(next_profile, grid, lambda);
    const double log_prev = log_discounted_sup(previous_profile, grid, lambda);
    const double ratio = std::exp(log_next - log_prev);
    if (ratio <= 0.5) return {lambda, ratio, true, false};
    if (ratio < out.ratio * (1.0 - 1e-12)) {
      out.lambda = lambda;
      out.ratio = ratio;
    }
  }
  return out;
}

double expected_xi_norm(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particles) {
  double total = 0.0;
  for (std::size_t i = 0; i < particles; ++i) {
    double sup = 0.0;
    for (int k = -grid.steps_per_delay(); k <= 0; ++k)
      sup = std::max(sup, model.lyapunov(model.initial_segment(seed, i, grid.time(k))));
    total += sup;
  }
  return total / static_cast<double>(particles);
}

double weighted_moment_sup(const MeasureFlow& flow, const LyapunovSpec& v, double n) {
  double best = 0.0;
  for (int k = 0; k <= flow.grid().steps(); ++k)
    best = std::max(best, std::exp(-n * flow.grid().time(k)) * mu_of_V(flow.at(k), v));
  return best;
}

namespace {

GrowthMonitor monitor_growth(const std::vector<MeasureFlow>& iterates, const ModelSpec& model, double xi_norm) {
  GrowthMonitor g;
  g.mu0_V = mu_of_V(iterates.front().at(0), model.lyapunov);
  g.expected_xi_norm = xi_norm;
  const double base = 1.0 + g.mu0_V + xi_norm;
  for (int n = 1; n <= kMaxMonitoredN; n *= 2) {
    const bool ok = std::all_of(iterates.begin(), iterates.end(), [&](const MeasureFlow& f) {
      return weighted_moment_sup(f, model.lyapunov, n) <= n * base;
    });
    if (!ok) continue;
    // Refine within (n/2, n]; the condition is monotone in N.
    int lo = n / 2, hi = n;
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      const bool mid_ok = std::all_of(iterates.begin(), iterates.end(), [&](const MeasureFlow& f) {
        return weighted_moment_sup(f, model.lyapunov, mid) <= mid * base;
      });
      (mid_ok ? hi : lo) = mid;
    }
    g.monitored_n = std::max(hi, 1);
    break;
  }
  if (g.monitored_n > 0)
    for (const auto& f : iterates)
      g.ratios.push_back(weighted_moment_sup(f, model.lyapunov, g.monitored_n) / (g.monitored_n * base));
  return g;
}

}  // namespace

PicardReport picard_iterate(const ModelSpec& model, std::uint64_t seed, std::size_t particles, const TimeGrid& grid,
                            const PicardOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("picard_iterate: tol must be positive");
  if (options.max_iter < 1) throw InvalidArgument("picard_iterate: max_iter must be >= 1");
  if (options.lambda < 0.0) throw InvalidArgument("picard_iterate: lambda must be >= 0");
  if (particles < 1) throw InvalidArgument("picard_iterate: need at least one particle");
  check_compatible(model, grid);

  const NoiseBank noise(seed, particles, grid, model.dim);
  std::vector<MeasureFlow> iterates{MeasureFlow::constant(grid, initial_law(model, grid, seed, particles))};
  std::vector<double> distances;
  std::vector<std::optional<double>> ratios;
  std::vector<std::vector<double>> profiles;
  bool converged = false;

  for (int it = 0; it < options.max_iter; ++it) {
    MeasureFlow next = apply_H(model, iterates.back(), noise, grid);
    profiles.push_back(flow_distance_profile(next, iterates.back(), model.psi, model.lyapunov));
    distances.push_back(discounted_sup(profiles.back(), grid, options.lambda));
    if (distances.size() >= 2 && distances[distances.size() - 2] > 0.0)
      ratios.emplace_back(distances.back() / distances[distances.size() - 2]);
    else
      ratios.emplace_back(std::nullopt);
    iterates.push_back(std::move(next));
    if (distances.back() < options.tol) {
      converged = true;
      break;
    }
  }

  std::optional<LambdaCalibration> calibration;
  if (profiles.size() >= 2) calibration = calibrate_lambda(profiles[0], profiles[1], grid);

  GrowthMonitor growth = monitor_growth(iterates, model, expected_xi_norm(model, grid, seed, particles));
  return PicardReport{.iterations = static_cast<int>(distances.size()),
                      .distances = std::move(distances),
                      .ratios = std::move(ratios),
                      .profiles = std::move(profiles),
                      .lambda = options.lambda,
                      .converged = converged,
                      .calibration = calibration,
                      .growth = std::move(growth),
                      .final_flow = std::move(iterates.back())};
}

}  // namespace mvsdde
