#ifndef VIDIAG_ERROR_HPP
#define VIDIAG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vidiag {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution or configuration parameter is out of its valid range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or non-finite input data. Carries the offending index
/// (0-based draw index or 1-based file line, depending on the producer).
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Fewer tail samples than a generalized Pareto fit needs.
class InsufficientTail : public Error {
 public:
  using Error::Error;
};

/// All tail exceedances are identical; the fit has no information.
class DegenerateTail : public Error {
 public:
  using Error::Error;
};

/// Importance weights sum to zero.
class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

}  // namespace vidiag

#endif
