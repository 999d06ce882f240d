#pragma once

#include <stdexcept>
#include <string>

namespace darwinics {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source and field point closer than the singular radius.
class CoincidentPointsError : public Error {
 public:
  using Error::Error;
};

/// Field point on (or within the singular radius of) a line source axis.
class OnAxisError : public Error {
 public:
  using Error::Error;
};

/// A closed path that passes through a line source axis.
class AxisCrossingError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the regime where the (v/c)^2 theory is valid.
class OutOfRegimeError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public OutOfRegimeError {
 public:
  using OutOfRegimeError::OutOfRegimeError;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class StepSizeUnderflowError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace darwinics
