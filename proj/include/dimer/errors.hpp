#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dimer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a meaningful result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The reduced Bloch vector has no y-z component, so no angle exists.
class UndefinedAngleError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A fixed point with a vanishing eigenvalue real part was hit while
/// classifying a phase; the caller should treat the point as a boundary.
class BoundaryIndeterminateError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : IoError(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dimer
