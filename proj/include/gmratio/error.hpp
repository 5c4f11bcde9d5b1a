#pragma once

#include <stdexcept>
#include <string>

namespace gmratio {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A weight construction whose correction element cannot be placed.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No admissible moment exponent certifies the requested bound.
class OptimizationFailure : public std::runtime_error {
 public:
  OptimizationFailure(const std::string& what, double best_threshold)
      : std::runtime_error(what), best_threshold_(best_threshold) {}

  double best_threshold() const noexcept { return best_threshold_; }

 private:
  double best_threshold_;
};

}  // namespace gmratio
