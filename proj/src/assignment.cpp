#include "mvsdde/assignment.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

#include "mvsdde/error.hpp"

namespace mvsdde {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw InvalidArgument("solve_assignment: cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  Assignment result;
  if (n == 0) return result;

  // Rows are scanned contiguously.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = cost;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual source of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int row = 1; row <= n; ++row) {
    row_of_col[0] = row;
    int col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const int i0 = row_of_col[col0];
      double delta = kInf;
      int col1 = 0;
      const double ui = u[i0];
      const double* crow = c.data() + static_cast<std::ptrdiff_t>(i0 - 1) * n;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = crow[j - 1] - ui - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    do {
      const int col1 = way[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.column_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) result.column_of_row[row_of_col[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) result.total_cost += cost(i, result.column_of_row[i]);
  return result;
}

}  // namespace mvsdde
