#pragma once

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace mvsdde {

/// Joint point (x_{-n}, ..., x_{-1}, x_0) of delayed and current positions,
/// each in R^d. Stored contiguously in that order; lag 0 is the current state
/// and lag i the position delayed by tau_i.
class DelayedState {
 public:
  DelayedState() = default;
  DelayedState(int n_delays, int dim)
      : n_(n_delays), d_(dim), data_(Eigen::VectorXd::Zero((n_delays + 1) * dim)) {}
  DelayedState(int n_delays, int dim, Eigen::VectorXd data);

  /// Components listed oldest first: {x_{-n}, ..., x_0}.
  static DelayedState from_components(const std::vector<Eigen::VectorXd>& components);
  /// Scalar (d = 1) convenience: {x_{-n}, ..., x_0}.
  static DelayedState scalar(std::initializer_list<double> components);

  int n_delays() const { return n_; }
  int dim() const { return d_; }

  auto lag(int i) const { return data_.segment((n_ - i) * d_, d_); }
  auto lag(int i) { return data_.segment((n_ - i) * d_, d_); }
  auto current() const { return lag(0); }

  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }

  bool same_shape(const DelayedState& other) const { return n_ == other.n_ && d_ == other.d_; }

 private:
  int n_ = 0;
  int d_ = 0;
  Eigen::VectorXd data_;
};

}  // namespace mvsdde
