#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Base for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define BIPHOTON_DEFINE_ERROR(Name, Tag)                       \
  class Name : public Error {                                  \
   public:                                                     \
    using Error::Error;                                        \
    const char* kind() const noexcept override { return Tag; } \
  };

// Malformed parameters (negative linewidth, t outside [0,1], bad grid, ...).
BIPHOTON_DEFINE_ERROR(InvalidArgument, "invalid_argument")
// The sampling window loses more than 1% of a shape's norm.
BIPHOTON_DEFINE_ERROR(CoverageError, "coverage")
// Requested outcome has vanishing probability so its amplitude cannot be normalized.
BIPHOTON_DEFINE_ERROR(DegenerateOutcomeError, "degenerate_outcome")
// Heralding event has (numerically) zero probability.
BIPHOTON_DEFINE_ERROR(ImpossibleHeraldError, "impossible_herald")
// Schmidt coefficients that do not square-sum to one.
BIPHOTON_DEFINE_ERROR(NormalizationError, "normalization")
// Linear algebra failure.
BIPHOTON_DEFINE_ERROR(ComputationError, "computation")
// Every optimizer restart started from an infeasible point.
BIPHOTON_DEFINE_ERROR(NoFeasibleStartError, "no_feasible_start")

#undef BIPHOTON_DEFINE_ERROR

}  // namespace biphoton
