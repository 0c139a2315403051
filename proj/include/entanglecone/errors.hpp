#pragma once

#include <stdexcept>
#include <string>

namespace entanglecone {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation (non-Hermitian,
// non-PSD, non-idempotent, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative routine failed to converge or an internal consistency check
// tripped.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A builtin object failed its own validation. Indicates a library bug.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace entanglecone
