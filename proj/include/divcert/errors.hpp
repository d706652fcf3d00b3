#pragma once

#include <stdexcept>
#include <string>

namespace divcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A Bregman/dual divergence came out below the rounding threshold, which
/// means the oracle is not convex or its gradient is wrong.
class NegativeDivergence : public Error {
 public:
  using Error::Error;
};

class MissingConjugateBound : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// An algorithm produced an Inf/NaN iterate (usually a step size that is too
/// large for the declared smoothness).
class NonFiniteIterate : public Error {
 public:
  using Error::Error;
};

/// An ODE integration produced an Inf/NaN state.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InvalidCustomSchedule : public Error {
 public:
  using Error::Error;
};

}  // namespace divcert
