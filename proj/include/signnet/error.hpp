#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace signnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not compose (matrix/vector sizes, layer widths, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value left the finite reals (NaN/Inf) or a numeric precondition failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed model / config / task file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

namespace detail {

inline std::string shape_str(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail
}  // namespace signnet
