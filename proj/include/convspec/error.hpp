#ifndef CONVSPEC_ERROR_HPP
#define CONVSPEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace convspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A kernel failed one of the structural checks (evenness, positivity, ...).
class ValidationError : public Error {
 public:
  ValidationError(std::string check, const std::string& what)
      : Error(what), check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

/// Root finder was handed an interval without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Iterative method exhausted its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Discretisation too coarse for the requested accuracy.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A numerically computed quantity failed an internal consistency check.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace convspec

#endif  // CONVSPEC_ERROR_HPP
