#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mvsdde {

/// Default seed used by the command-line tools when `--seed` is absent.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Uniform grid on [-tau, T] with step h = tau / m. Grid indices run from -m
/// (time -tau) to K (time T); index 0 is time 0.
class TimeGrid {
 public:
  TimeGrid(double tau, double horizon, int steps_per_delay, int steps);

  double tau() const { return tau_; }
  double horizon() const { return horizon_; }
  double step() const { return h_; }
  int steps_per_delay() const { return m_; }
  /// Number of forward steps K with K * h = T.
  int steps() const { return steps_; }
  /// Grid points in [-tau, 0], both ends included.
  int n_history() const { return m_ + 1; }
  int n_points() const { return m_ + steps_ + 1; }

  double time(int k) const { return k * h_; }

  bool operator==(const TimeGrid& other) const;

 private:
  double tau_;
  double horizon_;
  double h_;
  int m_;
  int steps_;
};

/// Builds the grid for delay tau, horizon T and m steps per delay. Throws
/// InvalidArgument when T is not an integer multiple of tau / m.
TimeGrid make_grid(double tau, double horizon, int steps_per_delay);

/// Purpose tags separating the independent random streams drawn for one
/// particle.
enum class StreamKind : std::uint32_t { kBrownian = 0, kInitial = 1, kProbe = 2 };

/// Descriptor of one particle's noise. Sampling is a pure function of the
/// descriptor, so streams can be evaluated in any order on any thread.
struct NoiseStream {
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t particle_index = 0;
  int dim = 1;
  StreamKind kind = StreamKind::kBrownian;
};

/// Counter-based generator: the i-th draw of a stream is a hash of
/// (seed, kind, particle, i). Satisfies UniformRandomBitGenerator so it can
/// also feed <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t particle, StreamKind kind);
  explicit CounterRng(const NoiseStream& stream)
      : CounterRng(stream.seed, stream.particle_index, stream.kind) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return bits(counter_++); }
  /// Random bits at an absolute counter position; does not advance.
  result_type bits(std::uint64_t counter) const;

  /// Uniform in the open interval (0, 1).
  double uniform();
  /// Standard normal via Box-Muller on consecutive counter pairs.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// The K Brownian increments of a stream on the grid, as a dim x K matrix whose
/// column k is W(t_{k+1}) - W(t_k) ~ N(0, h I).
Eigen::MatrixXd sample_increments(const NoiseStream& stream, const TimeGrid& grid);

/// Standard-normal draws of a stream reshaped to dim x count, scaled by
/// sqrt(variance). Used to build fine-level increments that coarse levels sum.
Eigen::MatrixXd sample_gaussian_block(const NoiseStream& stream, int count, double variance);

/// Stored increments for an ensemble, shared across repeated solves so that
/// solutions driven by different measure flows are coupled through one noise.
class NoiseBank {
 public:
  NoiseBank(std::uint64_t seed, std::size_t particles, const TimeGrid& grid, int dim);
  NoiseBank(std::uint64_t seed, std::vector<Eigen::MatrixXd> increments);

  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return increments_.size(); }
  const Eigen::MatrixXd& increments(std::size_t particle) const { return increments_[particle]; }

 private:
  std::uint64_t seed_;
  std::vector<Eigen::MatrixXd> increments_;
};

}  // namespace mvsdde
