#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dogs {

/// Invalid input: malformed model, bad indices, mismatched dimensions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A brute-force computation would exceed its state-space budget.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Two routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative method hit its cap; carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value,
                   std::vector<double> last_vector)
      : std::runtime_error(what),
        last_value_(last_value),
        last_vector_(std::move(last_vector)) {}

  double last_value() const noexcept { return last_value_; }
  const std::vector<double>& last_vector() const noexcept {
    return last_vector_;
  }

 private:
  double last_value_;
  std::vector<double> last_vector_;
};

}  // namespace dogs
