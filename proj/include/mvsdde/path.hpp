#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "mvsdde/stochastics.hpp"

namespace mvsdde {

/// Value of a path at an off-grid or on-grid time.
struct PathSample {
  Eigen::VectorXd value;
  bool exact = true;  ///< false when linear interpolation was used
};

/// One particle's trajectory on the grid over [-tau, T], history included.
class ParticlePath {
 public:
  ParticlePath(TimeGrid grid, std::size_t particle_index, int dim);

  const TimeGrid& grid() const { return grid_; }
  std::size_t particle_index() const { return particle_; }
  int dim() const { return static_cast<int>(values_.rows()); }

  /// Column for grid index k in [-m, K].
  auto at(int k) const { return values_.col(k + grid_.steps_per_delay()); }
  auto at(int k) { return values_.col(k + grid_.steps_per_delay()); }

  /// X(s) for s in [-tau, T]; grid values are returned exactly, other times
  /// by linear interpolation between neighbouring grid points.
  PathSample sample(double s) const;

  const Eigen::MatrixXd& values() const { return values_; }

 private:
  TimeGrid grid_;
  std::size_t particle_;
  Eigen::MatrixXd values_;
};

}  // namespace mvsdde
