#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvsdde/fixedpoint.hpp"
#include "mvsdde/model.hpp"

namespace mvsdde {

struct StrongErrorRow {
  int steps_per_delay = 0;
  double h = 0.0;
  double rms_error = 0.0;
};

struct StrongOrderStudy {
  std::vector<StrongErrorRow> rows;
  int reference_steps_per_delay = 0;
  /// Least-squares slope of log2(rms error) against log2(h).
  double order = 0.0;
};

/// Root-mean-square error at T of a measure-free model against a reference
/// solution on a grid `refinement` times finer than the finest level. Every
/// level of a path is driven by sums of the same fine increments.
StrongOrderStudy strong_order_study(const ModelSpec& model, double horizon, const std::vector<int>& steps_per_delay,
                                    int refinement, std::size_t paths, std::uint64_t seed);

/// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Seed of the particle run compared against the Picard run of `seed`.
std::uint64_t independent_seed(std::uint64_t seed);

struct ChaosSample {
  std::size_t particles = 0;
  std::uint64_t seed = 0;
  double w1 = 0.0;
  bool picard_converged = false;
  int picard_iterations = 0;
};

/// Terminal-law W1 distance between the Picard fixed point (seed) and the
/// interacting particle system run on independent noise and initial data
/// (independent_seed(seed)), both with N particles.
ChaosSample particle_vs_fixpoint(const ModelSpec& model, const TimeGrid& grid, std::size_t particles,
                                 std::uint64_t seed, const PicardOptions& options);

/// W_{psi,V} with psi = identity and V = 0: W1 under the averaged norm.
double wasserstein_1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

}  // namespace mvsdde
