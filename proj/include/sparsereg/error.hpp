#pragma once

#include <stdexcept>
#include <string>

namespace sparsereg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside the domain where the requested quantity is defined.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A design does not satisfy the coherence requirement demanded by an operation.
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before meeting its stopping criterion.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsereg
