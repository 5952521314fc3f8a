#pragma once

#include <stdexcept>
#include <string>

namespace av {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a curve or special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tabulated curve queried past its last knot.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// (f, g, m0) violates -f(0) < g(0) or m0 in [-f(0), g(0)].
class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// Quadrature budget exhausted or a non-finite intermediate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace av
