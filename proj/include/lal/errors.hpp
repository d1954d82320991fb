#pragma once

#include <stdexcept>
#include <string>

namespace lal {

/// Bad user input: configuration values, preconditions, malformed files.
class ConfigError : public std::runtime_error {
  public:
    enum class Kind { missing_file, parse, constraint };

    ConfigError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

/// A simulation left the regime where the discretization is trustworthy
/// (non-finite state, energy growth past the guard, time step too large
/// for the advecting field).
class SimulationError : public std::runtime_error {
  public:
    SimulationError(int step, std::string message) : std::runtime_error(std::move(message)), step_(step) {}

    int step() const { return step_; }

  private:
    int step_;
};

/// A mathematical property the implementation guarantees was observed to
/// fail; this indicates an implementation fault, not bad input.
class PropertyViolation : public std::runtime_error {
  public:
    explicit PropertyViolation(std::string message) : std::runtime_error(std::move(message)) {}
};

}  // namespace lal
