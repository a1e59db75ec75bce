#ifndef MIRS_ERRORS_HPP
#define MIRS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mirs {

// Invalid configuration: bad seeds/paths, replicate counts, alpha, etc.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed user-supplied data (CSV parsing, schema violations).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model fitting failed (separation beyond the ridge fallback, singular
// information, non-factorizable covariance).
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Imputation preconditions violated (no complete cases, single-class outcome).
struct ImputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Estimation-stage failure (single-source data, degenerate weights).
struct EstimateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Monte Carlo study could not be completed (too many failed repetitions).
struct StudyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mirs

#endif  // MIRS_ERRORS_HPP
