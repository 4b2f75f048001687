#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

// Violated precondition of an operation (bad grid size, space-tag mismatch,
// unsupported dimension, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time evolution produced non-finite values or tripped the blow-up guard.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, long step, double time)
      : std::runtime_error(what + " (step " + std::to_string(step) + ", t = " + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}

  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

// Scenario configuration problem; carries the line number or key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlab
