#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvsdde {

/// Invalid input: bad shapes, violated preconditions, malformed files.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t particle, std::ptrdiff_t step)
      : std::runtime_error(what + " (particle " + std::to_string(particle) + ", step " +
                           std::to_string(step) + ")"),
        particle_(particle),
        step_(step) {}

  std::size_t particle() const { return particle_; }
  std::ptrdiff_t step() const { return step_; }

 private:
  std::size_t particle_;
  std::ptrdiff_t step_;
};

}  // namespace mvsdde
