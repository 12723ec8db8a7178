#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace predsnell {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated operation precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the caller-supplied budget. Raised instead of
/// silently truncating the enumeration.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(std::size_t limit)
      : Error("enumeration budget exceeded (limit " + std::to_string(limit) +
              " stopping times)"),
        limit(limit) {}
  std::size_t limit;
};

/// Broken internal invariant: an engine bug, never expected on valid input.
class InternalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

inline void internal_check(bool ok, const std::string& what) {
  if (!ok) throw InternalError("internal invariant violated: " + what);
}

}  // namespace detail
}  // namespace predsnell
