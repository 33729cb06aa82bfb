#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid problem data or arguments (maps to CLI exit code 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class AllZeroInitialData : public InvalidInput {
 public:
  AllZeroInitialData() : InvalidInput("u0 is identically zero") {}
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NonPositiveEigenvalue : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NonPositiveGamma : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidEpsilon : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidBand : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Failures of the time integration (maps to CLI exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public NumericError {
 public:
  using NumericError::NumericError;
};

class BlowupDetected : public NumericError {
 public:
  using NumericError::NumericError;
};

class ToleranceNotMet : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Diagnostics requested on a trace that cannot support them.
class DegenerateTrace : public Error {
 public:
  using Error::Error;
};

class InsufficientTail : public Error {
 public:
  using Error::Error;
};

}  // namespace kirchhoff
