#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvsdde/measure.hpp"
#include "mvsdde/model.hpp"
#include "mvsdde/path.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// History segment xi(seed, particle, .) written onto grid indices -m..0.
ParticlePath initial_path(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particle);

/// Checks that a model can be integrated on a grid (history length, delay
/// ranges, shapes).
void check_compatible(const ModelSpec& model, const TimeGrid& grid);

/// One Euler-Maruyama step from grid index k under the measure mu:
///   X_{k+1} = X_k + b(X_k, mu) h + sigma(X_k) dW_k.
/// Throws NumericError on a non-finite result.
void euler_step(const ModelSpec& model, const EmpiricalMeasure& mu, const Eigen::VectorXd& dw, int k,
                ParticlePath& path);

/// Frozen-flow solution X^mu: the delay equation with mu_t substituted from
/// the given flow, integrated by Euler-Maruyama with mu frozen at mu_{t_k} on
/// [t_k, t_{k+1}). `increments` is dim x K.
ParticlePath solve_frozen(const ModelSpec& model, const MeasureFlow& flow, const Eigen::MatrixXd& increments,
                          const TimeGrid& grid, std::uint64_t seed, std::size_t particle);

/// Same, with increments drawn from the stream (its seed also selects xi).
ParticlePath solve_frozen(const ModelSpec& model, const MeasureFlow& flow, const NoiseStream& noise,
                          const TimeGrid& grid);

/// N frozen-flow solutions driven by stored increments.
std::vector<ParticlePath> solve_ensemble_frozen(const ModelSpec& model, const MeasureFlow& flow,
                                                const NoiseBank& noise, const TimeGrid& grid);

/// N frozen-flow solutions, particle i driven by NoiseStream(seed, i).
std::vector<ParticlePath> solve_ensemble_frozen(const ModelSpec& model, const MeasureFlow& flow, std::uint64_t seed,
                                                std::size_t particles, const TimeGrid& grid);

/// Empirical law at t = 0 of N particles (no integration needed).
EmpiricalMeasure initial_law(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particles);

}  // namespace mvsdde
