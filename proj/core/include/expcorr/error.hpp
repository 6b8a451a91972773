#pragma once

#include <stdexcept>
#include <string>

namespace expcorr {

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

/// Malformed or structurally invalid input data (ragged rows, empty rows, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Input is valid but carries no usable variance (constant vectors, zero
/// residual mean square, zero resampling spread).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace expcorr
