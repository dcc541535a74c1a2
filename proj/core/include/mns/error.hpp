#pragma once

#include <stdexcept>
#include <string>

namespace mns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Input is not a density matrix (non-Hermitian, wrong trace, or not PSD).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// A quantity that is guaranteed by construction came out wrong; this
/// signals a bug rather than bad input.
class NumericalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace mns
