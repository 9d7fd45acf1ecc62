#pragma once

#include <stdexcept>
#include <string>

namespace itreg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, empty grid, non-finite entries.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A method parameter is outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Numerical failures. The CLI maps these to exit code 1.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DecompositionFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace itreg
