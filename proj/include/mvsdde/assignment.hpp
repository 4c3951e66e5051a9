#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mvsdde {

struct Assignment {
  /// row -> column
  std::vector<int> column_of_row;
  /// Sum of cost(i, column_of_row[i]) in row order.
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching of a square cost matrix by the
/// shortest-augmenting-path Hungarian method with dual potentials, O(N^3).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace mvsdde
