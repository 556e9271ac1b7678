#pragma once

#include <stdexcept>
#include <string>

namespace hbarsim {

// Bad inputs: rejected before any computation runs. The CLI maps these to
// exit status 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation that cannot deliver the requested result. CLI exit status 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveHorizon : ValidationError {
  using ValidationError::ValidationError;
};

// Requested grid step below the noise correlation time; sub-correlation
// structure is model dependent, so sampling there is refused.
struct StepBelowCorrelationTime : ValidationError {
  using ValidationError::ValidationError;
};

struct NegativeTime : ValidationError {
  using ValidationError::ValidationError;
};

struct MissingCorrelationTime : ValidationError {
  using ValidationError::ValidationError;
};

struct NonPositiveLength : ValidationError {
  using ValidationError::ValidationError;
};

struct InvalidMeasurementError : ValidationError {
  using ValidationError::ValidationError;
};

struct BracketFailure : NumericalError {
  using NumericalError::NumericalError;
};

// The requested measurement precision excludes no parameter value.
struct UnattainablePrecision : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace hbarsim
