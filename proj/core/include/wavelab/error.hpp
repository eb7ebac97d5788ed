#pragma once

#include <stdexcept>
#include <string>

namespace wavelab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (bad exponent, size mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical computation produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Reading or writing a serialized artifact failed.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavelab
