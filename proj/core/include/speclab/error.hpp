#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

// Base class for all library errors.  Subclasses exist so callers (and the
// CLI's exit-code mapping) can tell *why* an operation was rejected without
// parsing message text.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed tree topology: unknown node ids, children attached to parents on
// the wrong layer, out-of-range indices.
struct StructuralError : Error {
  using Error::Error;
};

// An operation would grow a tree past its node budget.
struct BudgetError : Error {
  using Error::Error;
};

// Caller-supplied data is invalid for the operation: out-of-vocab tokens,
// empty parent sets, policy/tree mismatches.
struct InputError : Error {
  using Error::Error;
};

// Layer gating cannot proceed (e.g. an empty candidate pool).
struct GatingError : Error {
  using Error::Error;
};

// A configuration or policy parameter is outside its legal range.
struct ParamError : Error {
  using Error::Error;
};

// A metric is undefined for the given counters (e.g. no verification steps).
struct MetricError : Error {
  using Error::Error;
};

// Filesystem trouble while reading or writing run artifacts.
struct IoError : Error {
  using Error::Error;
};

// A config file failed validation; message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace speclab
