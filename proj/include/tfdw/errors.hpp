#pragma once

#include <stdexcept>
#include <string>

namespace tfdw {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computational window or transform grid that cannot be used.
class SizingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A search move that is not valid for the current configuration.
class MoveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested exhaustive computation exceeds its supported size.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tfdw
