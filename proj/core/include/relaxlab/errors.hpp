#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace relaxlab {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or argument violations (non-square input, bad tolerances, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Resolvent requested at (or numerically at) an eigenvalue.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::complex<double> eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  std::complex<double> eigenvalue() const { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

/// A matrix exponential or power left the representable floating-point range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The iterative eigensolver failed to converge.
class EigensolverError : public Error {
 public:
  using Error::Error;
};

/// A documented operation precondition does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The zero eigenvalue of Q is defective; no block decomposition exists.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// A system file does not match the expected JSON schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace relaxlab
