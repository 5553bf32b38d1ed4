#pragma once

#include <stdexcept>
#include <string>

namespace ocbf {

/// Bad arguments or a violated precondition (dimension mismatch, non-Hermitian input, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed scenario / solution / sweep file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transmission strategy cannot be built for this scenario (e.g. empty ZF null space).
class InfeasibleStrategy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The interior-point solver could not produce a usable iterate.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ocbf
