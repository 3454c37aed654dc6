#pragma once

#include <stdexcept>
#include <string>

namespace simpcoll {

/// Invalid input data or arguments (malformed table, bad subset, zero-mass slice, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two independent computation routes disagreed; signals a defect, not a data condition.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace simpcoll
