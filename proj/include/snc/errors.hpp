#pragma once

#include <stdexcept>
#include <string>

namespace snc {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Division by the zero element of a finite field.
class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A formula or bound was requested for a design it does not cover.
class NotApplicableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Caller broke an API precondition (ordering, missing history, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace snc
