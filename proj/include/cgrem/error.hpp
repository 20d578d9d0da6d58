#pragma once

#include <stdexcept>
#include <string>

namespace cgrem {

// Base of every error raised by the library. The CLI maps all of these to
// exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands of different system sizes (or a matrix of the wrong dimension).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A request exceeds an enumeration, matrix, or audit cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input: unnormalized weights, asymmetric or
// indefinite matrices, bad trees, NaN energies.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The operation has no meaning for this model kind (e.g. structural
// sampling of a custom matrix).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Data required at some system size was not supplied (custom models).
class MissingDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgrem
