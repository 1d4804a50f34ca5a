#pragma once

#include <stdexcept>
#include <string>

namespace tvaoi {

/// Invalid user-facing configuration (class count, rates, periods, grids).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or impossible normalisations during a numerical run.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  /// Time at which the failure was first detected.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Too few samples for a statistical estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tvaoi
