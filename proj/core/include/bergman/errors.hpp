#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A constructor or factory was given parameters outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A query point lies outside the truncated disc or another spatial domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A builder exhausted its point budget before satisfying its postcondition.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Quadrature failed to converge to the requested tolerance.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A basis truncation tail exceeds its tolerance; enlarge n_basis.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an interface contract (dimension mismatch etc).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A computed object violates a numerical consistency invariant.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace bergman
