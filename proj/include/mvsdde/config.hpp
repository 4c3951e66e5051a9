#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvsdde/model.hpp"
#include "mvsdde/models.hpp"
#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// Malformed or incomplete configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSection {
  std::size_t particles = 256;
  /// Times in [0, T] at which the empirical measure is written.
  std::vector<double> measure_times;
};

struct FixpointSection {
  std::size_t particles = 256;
  double tol = 1e-3;
  int max_iter = 50;
  double lambda = 0.0;
  std::vector<double> dump_times;
};

struct VerifySection {
  /// "declared": check the model's constants; "estimate": report estimates only.
  std::string constants = "declared";
  std::size_t probes = 10000;
  double box = 5.0;
  std::size_t random_measures = 6;
  std::size_t atoms = 32;
  std::size_t particles = 256;
  std::size_t radial_particles = 512;
  std::optional<double> K;
  std::optional<double> theta;
  std::optional<double> zeta;
  double K_scale = 1.0;
};

struct ConvergenceSection {
  /// "h" (strong error against a refined reference) or "N" (particle count).
  std::string sweep = "h";
  std::vector<int> steps_per_delay{16, 32, 64, 128, 256};
  int refinement = 64;
  std::size_t paths = 1000;
  std::vector<std::size_t> particles{64, 128, 256};
  std::size_t seeds = 20;
};

struct Config {
  TimeGrid grid;
  ModelSpec model;
  std::optional<OpinionParams> opinion;
  RunSection run;
  FixpointSection fixpoint;
  VerifySection verify;
  ConvergenceSection convergence;
};

/// Parses a JSON document with sections {grid, model, run, fixpoint, verify,
/// convergence}. Throws ConfigError naming the offending field.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace mvsdde
