#pragma once

#include <stdexcept>

namespace codedq {

// Model constraint violated (r >= 2, mu > 0, lambda >= 0, bad tolerance, ...).
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arrival rate at or above the capacity of the system being analyzed.
class UnstableSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mean delay requested with a zero arrival rate; the ratio is undefined.
class DivisionByZero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stationary iterate went negative beyond rounding noise (-1e-12); the
// recursion is not trusted past that point and results are discarded.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The direct linear solve did not produce a usable stationary vector.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two distributions over different state spaces were compared.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace codedq
