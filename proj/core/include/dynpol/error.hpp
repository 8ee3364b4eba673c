#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynpol {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (negative intensity,
/// out-of-range R, |M| > J, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Conversion requested between incompatible unit kinds.
class UnitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A curve or table violates one of its structural invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Sum-over-states kernel evaluated exactly on an undamped pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Assembly guard tripped; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Run configuration refers to missing files or inconsistent roles.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dynpol
