#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tda {

// Root of every exception the library throws on its own account.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Input is well formed but semantically unusable (e.g. a non-VR H0 diagram).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A filtration that breaks face-before-coface or ordering invariants.
class InconsistentFiltrationError : public Error {
 public:
  using Error::Error;
};

// The brute-force oracles only run on small, low-dimensional inputs.
class ScopeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public ScopeError {
 public:
  using ScopeError::ScopeError;
};

class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tda
