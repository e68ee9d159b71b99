#pragma once

#include <stdexcept>
#include <string>

namespace fracpq {

/// Invalid grid, exponent or option value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent combination outside the supported regime (e.g. s*r >= 1 for the
/// leading operator, or p >= q*_beta in the whole-space setting).
class RegimeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No admissible function has a positive denominator (weight without positive
/// part, or every sampled start lands in {Psi <= 0}).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by find_descent_endpoint when J(t d) stays nonnegative up to the
/// doubling cap.
class NoDescentDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracpq
