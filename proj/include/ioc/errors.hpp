#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioc {

// Base class for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Vector/matrix sizes inconsistent, or a state/control with non-finite entries.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An operation was called on a model of the wrong time regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// Expression text failed to parse; position is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluating an expression hit a mathematical domain violation
// (division by zero, sqrt of a negative, 0 raised to a negative power, ...).
class EvalDomainError : public Error {
 public:
  using Error::Error;
};

// A system configuration is malformed or violates a model invariant
// that is checked at load time (f(0) != 0, bad discount factor, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownSystemError : public Error {
 public:
  using Error::Error;
};

// A standing model assumption (R(x) > 0, g(x) max rank) failed at a
// concrete state encountered during evaluation; the message names it.
class ModelAssumptionError : public Error {
 public:
  using Error::Error;
};

// A simulated state stopped being finite; the message names the step.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioc
