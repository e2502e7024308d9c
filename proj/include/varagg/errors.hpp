#pragma once

#include <stdexcept>
#include <string>

namespace varagg {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent model description: dimension mismatch, unknown catalog entry, bad fragment.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Problem too large for an exact enumeration.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace varagg
