#pragma once

#include <stdexcept>
#include <string>

namespace stoprule {

/// Malformed input: bad parameters, unparseable files, unknown kinds.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (n = 0, u > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The continuous-only engine was handed a law with atoms.
class ContinuityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact computation would exceed the configured state-space budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace stoprule
