#include "mvsdde/particle.hpp"

#include "mvsdde/measure.hpp"
#include "mvsdde/parallel.hpp"
#include "mvsdde/solver.hpp"

namespace mvsdde {

std::vector<ParticlePath> simulate_particles(const ModelSpec& model, const NoiseBank& noise, const TimeGrid& grid) {
  check_compatible(model, grid);
  std::vector<ParticlePath> paths;
  paths.reserve(noise.size());
  for (std::size_t i = 0; i < noise.size(); ++i) paths.push_back(initial_path(model, grid, noise.seed(), i));

  for (int k = 0; k < grid.steps(); ++k) {
    // Built before any particle moves; read-only for the whole step.
    const EmpiricalMeasure mu_hat = empirical_from_ensemble(paths, grid.time(k), model);
    detail::parallel_for(paths.size(), [&](std::size_t i) {
      euler_step(model, mu_hat, noise.increments(i).col(k), k, paths[i]);
    });
  }
  return paths;
}

std::vector<ParticlePath> simulate_particles(const ModelSpec& model, std::uint64_t seed, std::size_t particles,
                                             const TimeGrid& grid) {
  return simulate_particles(model, NoiseBank(seed, particles, grid, model.dim), grid);
}

}  // namespace mvsdde
