#pragma once

#include <stdexcept>
#include <string>

namespace bdsfix {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input: timestamps, CSV rows, JSON lines.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Input outside a function's domain (degenerate vectors, bad ranges).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Orbit propagation failure, including Kepler non-convergence.
class PropagationError : public Error {
 public:
  using Error::Error;
};

// Singular or rank-deficient least-squares geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdsfix
