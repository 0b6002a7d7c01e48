#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace phimod {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FieldMismatch : public Error {
 public:
  FieldMismatch() : Error("operands live over different coefficient fields") {}
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
  DivisionByZero() : Error("division by zero") {}
};

/// A digit needed for an exact decision is not certified at the current precision.
class InsufficientPrecision : public Error {
 public:
  using Error::Error;
};

class Singular : public Error {
 public:
  using Error::Error;
  Singular() : Error("matrix is singular") {}
};

/// A documented precondition of an algorithm does not hold.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

/// An iterate left the congruence subgroup it must lie in. Never expected.
class IterateEscaped : public Error {
 public:
  using Error::Error;
};

class BoxTooLarge : public Error {
 public:
  BoxTooLarge(double estimate, double limit)
      : Error("enumeration too large: estimated " + std::to_string(static_cast<long long>(estimate)) +
              " candidates exceeds limit " + std::to_string(static_cast<long long>(limit))),
        estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                   : what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace phimod
