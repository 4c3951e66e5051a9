#include "mvsdde/stochastics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mvsdde/error.hpp"
#include "mvsdde/parallel.hpp"

namespace mvsdde {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

TimeGrid::TimeGrid(double tau, double horizon, int steps_per_delay, int steps)
    : tau_(tau), horizon_(horizon), h_(tau / steps_per_delay), m_(steps_per_delay), steps_(steps) {}

bool TimeGrid::operator==(const TimeGrid& other) const {
  return m_ == other.m_ && steps_ == other.steps_ && tau_ == other.tau_ &&
         horizon_ == other.horizon_;
}

TimeGrid make_grid(double tau, double horizon, int steps_per_delay) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("grid: tau must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidArgument("grid: horizon T must be positive");
  if (steps_per_delay < 1) throw InvalidArgument("grid: steps per delay m must be >= 1");
  const double h = tau / steps_per_delay;
  const double ratio = horizon / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "grid: horizon T=" << horizon << " is not an integer multiple of the step h=tau/m=" << h
        << " (T/h=" << ratio << ")";
    throw InvalidArgument(msg.str());
  }
  return TimeGrid(tau, horizon, steps_per_delay, static_cast<int>(rounded));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t particle, StreamKind kind)
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(kind)) ^ particle)) {}

CounterRng::result_type CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterRng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::MatrixXd sample_gaussian_block(const NoiseStream& stream, int count, double variance) {
  CounterRng rng(stream);
  const double scale = std::sqrt(variance);
  Eigen::MatrixXd out(stream.dim, count);
  for (int k = 0; k < count; ++k)
    for (int j = 0; j < stream.dim; ++j) out(j, k) = scale * rng.normal();
  return out;
}

Eigen::MatrixXd sample_increments(const NoiseStream& stream, const TimeGrid& grid) {
  return sample_gaussian_block(stream, grid.steps(), grid.step());
}

NoiseBank::NoiseBank(std::uint64_t seed, std::size_t particles, const TimeGrid& grid, int dim)
    : seed_(seed), increments_(particles) {
  detail::parallel_for(particles, [&](std::size_t i) {
    increments_[i] = sample_increments(NoiseStream{seed, i, dim, StreamKind::kBrownian}, grid);
  });
}

NoiseBank::NoiseBank(std::uint64_t seed, std::vector<Eigen::MatrixXd> increments)
    : seed_(seed), increments_(std::move(increments)) {}

}  // namespace mvsdde
