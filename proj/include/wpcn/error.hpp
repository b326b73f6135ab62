#pragma once

#include <stdexcept>
#include <string>

namespace wpcn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap before meeting the tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A closed form lost too much precision to be trusted (e.g. a series left [0, 1]).
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A search could not find any admissible point (e.g. no harvest length meets the target).
class UnsatisfiableError : public Error {
 public:
  using Error::Error;
};

/// A numerical optimization found nothing to maximize.
class SearchError : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& where, const std::string& what) {
  throw DomainError(where + ": " + what);
}

inline void require(bool ok, const char* where, const char* what) {
  if (!ok) domain_fail(where, what);
}

}  // namespace detail
}  // namespace wpcn
