#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvsdde/model.hpp"
#include "mvsdde/path.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// Interacting particle system: at every step the drift of each particle is
/// evaluated against the empirical joint law of the whole ensemble at t_k
/// (self included). Particle i uses NoiseStream(seed, i).
std::vector<ParticlePath> simulate_particles(const ModelSpec& model, std::uint64_t seed, std::size_t particles,
                                             const TimeGrid& grid);

/// Same with stored increments.
std::vector<ParticlePath> simulate_particles(const ModelSpec& model, const NoiseBank& noise, const TimeGrid& grid);

}  // namespace mvsdde
