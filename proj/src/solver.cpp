#include "mvsdde/solver.hpp"

#include <cmath>
#include <sstream>

#include "mvsdde/error.hpp"
#include "mvsdde/parallel.hpp"

namespace mvsdde {

ParticlePath initial_path(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particle) {
  ParticlePath path(grid, particle, model.dim);
  for (int k = -grid.steps_per_delay(); k <= 0; ++k) {
    const Eigen::VectorXd xi = model.initial_segment(seed, particle, grid.time(k));
    if (xi.size() != model.dim) throw InvalidArgument("initial segment returned a vector of the wrong dimension");
    path.at(k) = xi;
  }
  return path;
}

void check_compatible(const ModelSpec& model, const TimeGrid& grid) {
  if (std::abs(grid.tau() - model.tau) > 1e-12 * std::max(1.0, model.tau)) {
    std::ostringstream msg;
    msg << "grid history length tau=" << grid.tau() << " differs from the model's maximal delay tau=" << model.tau;
    throw InvalidArgument(msg.str());
  }
  validate_model(model, grid.horizon());
}

void euler_step(const ModelSpec& model, const EmpiricalMeasure& mu, const Eigen::VectorXd& dw, int k,
                ParticlePath& path) {
  const double h = path.grid().step();
  const DelayedState x = joint_state(path, path.grid().time(k), model);
  const Eigen::VectorXd b = model.drift(x, mu);
  const Eigen::MatrixXd sigma = model.diffusion(x);
  if (b.size() != model.dim || sigma.rows() != model.dim || sigma.cols() != model.dim)
    throw InvalidArgument("drift or diffusion returned the wrong shape");
  if (!b.allFinite() || !sigma.allFinite())
    throw NumericError("non-finite drift or diffusion", path.particle_index(), k);
  path.at(k + 1) = path.at(k) + b * h + sigma * dw;
  if (!path.at(k + 1).allFinite()) throw NumericError("non-finite state", path.particle_index(), k);
}

ParticlePath solve_frozen(const ModelSpec& model, const MeasureFlow& flow, const Eigen::MatrixXd& increments,
                          const TimeGrid& grid, std::uint64_t seed, std::size_t particle) {
  if (!(flow.grid() == grid)) throw InvalidArgument("solve_frozen: flow is defined on a different grid");
  if (increments.rows() != model.dim || increments.cols() != grid.steps())
    throw InvalidArgument("solve_frozen: increments must be dim x K");
  ParticlePath path = initial_path(model, grid, seed, particle);
  for (int k = 0; k < grid.steps(); ++k) euler_step(model, flow.at(k), increments.col(k), k, path);
  return path;
}

ParticlePath solve_frozen(const ModelSpec& model, const MeasureFlow& flow, const NoiseStream& noise,
                          const TimeGrid& grid) {
  check_compatible(model, grid);
  NoiseStream stream = noise;
  stream.dim = model.dim;
  stream.kind = StreamKind::kBrownian;
  return solve_frozen(model, flow, sample_increments(stream, grid), grid, noise.seed, noise.particle_index);
}

std::vector<ParticlePath> solve_ensemble_frozen(const ModelSpec& model, const MeasureFlow& flow,
                                                const NoiseBank& noise, const TimeGrid& grid) {
  check_compatible(model, grid);
  std::vector<ParticlePath> paths(noise.size(), ParticlePath(grid, 0, model.dim));
  detail::parallel_for(noise.size(), [&](std::size_t i) {
    paths[i] = solve_frozen(model, flow, noise.increments(i), grid, noise.seed(), i);
  });
  return paths;
}

std::vector<ParticlePath> solve_ensemble_frozen(const ModelSpec& model, const MeasureFlow& flow, std::uint64_t seed,
                                                std::size_t particles, const TimeGrid& grid) {
  return solve_ensemble_frozen(model, flow, NoiseBank(seed, particles, grid, model.dim), grid);
}

EmpiricalMeasure initial_law(const ModelSpec& model, const TimeGrid& grid, std::uint64_t seed, std::size_t particles) {
  check_compatible(model, grid);
  std::vector<ParticlePath> paths;
  paths.reserve(particles);
  for (std::size_t i = 0; i < particles; ++i) paths.push_back(initial_path(model, grid, seed, i));
  return empirical_from_ensemble(paths, 0.0, model);
}

}  // namespace mvsdde
