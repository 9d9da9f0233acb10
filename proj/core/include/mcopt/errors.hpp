#pragma once

#include <stdexcept>
#include <string>

namespace mcopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (bad index, invalid point, bad scenario).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A measurement table is missing (workload, point) cells.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

/// A measurement table repeats a (workload, point) cell.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

/// A measured or priced value is not strictly positive and finite.
class ValueError : public Error {
 public:
  using Error::Error;
};

/// Surrogate training data cannot be fitted (e.g. conflicting duplicate inputs).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A linear system stayed singular after regularization escalation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Optimizer suggest/observe calls made out of order.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Search budget is infeasible for the requested algorithm.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A computed result contradicts an invariant that complete inputs guarantee.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// An objective callback failed; the message carries the search step and point.
class ObjectiveError : public Error {
 public:
  using Error::Error;
};

/// True when the error stems from user input (flags, files) rather than an internal failure.
bool is_user_error(const std::exception& e) noexcept;

}  // namespace mcopt
