#pragma once

#include <stdexcept>
#include <string>

namespace bqsos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidIndex : public Error {
 public:
  using Error::Error;
};

class InvalidCoefficient : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// Raised by SOS extraction when the Gram matrix has an eigenvalue below -psd_tol.
class NotPsd : public Error {
 public:
  using Error::Error;
};

/// A 2x2 reduction was handed a form that violates the PSD necessary conditions.
class NotPsdInput : public Error {
 public:
  using Error::Error;
};

class WrongCase : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure (bracket lost, reconstruction mismatch). Indicates a bug.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class InvalidSubstitution : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_dimension(const std::string& what);

}  // namespace bqsos
