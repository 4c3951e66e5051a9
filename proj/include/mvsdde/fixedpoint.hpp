#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mvsdde/measure.hpp"
#include "mvsdde/model.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// H(mu)_t = Law(X^mu(t)) on the grid: the frozen-flow ensemble under `flow`,
/// read back as empirical measures. The same noise gives coupled outputs for
/// different input flows.
MeasureFlow apply_H(const ModelSpec& model, const MeasureFlow& flow, const NoiseBank& noise, const TimeGrid& grid);
MeasureFlow apply_H(const ModelSpec& model, const MeasureFlow& flow, std::uint64_t seed, std::size_t particles,
                    const TimeGrid& grid);

struct LambdaCalibration {
  double lambda = 0.0;
  /// Ratio W_lambda(next) / W_lambda(prev) at the returned lambda.
  double ratio = 0.0;
  /// Some grid value reached ratio <= 1/2.
  bool achieved = false;
  /// The earlier distance was zero: the iterate is already a fixed point.
  bool exact_fixed_point = false;
};

/// Candidate discount rates: 0 followed by 2^j / 4 for j = 0..kLambdaGridSize-1.
std::vector<double> lambda_search_grid();

/// Smallest lambda on the search grid for which the discounted distance ratio
/// of two successive per-time profiles is at most 1/2.
LambdaCalibration calibrate_lambda(const std::vector<double>& previous_profile,
                                   const std::vector<double>& next_profile, const TimeGrid& grid);

struct PicardOptions {
  /// Discount rate of the stopping metric; 0 is the plain sup over time.
  double lambda = 0.0;
  double tol = 1e-3;
  int max_iter = 50;
};

/// Membership of a flow in P^N_{V,T}:
///   sup_t e^{-N t} mu_t(V) <= N (1 + mu_0(V) + E||xi||_V).
struct GrowthMonitor {
  /// Smallest integer N >= 1 satisfying the bound for every iterate.
  int monitored_n = 0;
  /// Per iterate: sup_t e^{-N t} mu_t(V) / (N (1 + mu_0(V) + E||xi||_V)).
  std::vector<double> ratios;
  double mu0_V = 0.0;
  double expected_xi_norm = 0.0;
};

struct PicardReport {
  int iterations = 0;
  /// distances[k] = W_{psi,V,lambda}(mu^{k+1}, mu^k), k = 0..iterations-1.
  std::vector<double> distances;
  /// ratios[k] = distances[k] / distances[k-1]; empty where undefined.
  std::vector<std::optional<double>> ratios;
  /// Per-time W_{psi,V} profiles behind each distance.
  std::vector<std::vector<double>> profiles;
  double lambda = 0.0;
  bool converged = false;
  std::optional<LambdaCalibration> calibration;
  GrowthMonitor growth;
  MeasureFlow final_flow;
};

/// E[sup_{u in [-tau,0]} V(xi(u))], sup taken over the grid history points.
double expected_xi_norm(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particles);

/// sup_k e^{-N t_k} mu_{t_k}(V).
double weighted_moment_sup(const MeasureFlow& flow, const LyapunovSpec& v, double n);

/// Picard iteration mu^{k+1} = H(mu^k) from the flow frozen at the initial
/// law, with one noise bank shared by every iteration. Stops when the
/// distance between successive iterates falls below tol; reports
/// converged = false if max_iter is reached first.
PicardReport picard_iterate(const ModelSpec& model, std::uint64_t seed, std::size_t particles, const TimeGrid& grid,
                            const PicardOptions& options = {});

}  // namespace mvsdde
