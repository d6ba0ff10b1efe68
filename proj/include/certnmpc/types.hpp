#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace certnmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input bounds are empty or inverted (u_hi <= u_lo in some component).
struct InvalidBoundsError : Error {
  using Error::Error;
};

/// An integration step produced a non-finite state.
struct IntegrationDivergedError : Error {
  explicit IntegrationDivergedError(const std::string& what, int stage_index = -1)
      : Error(what), stage(stage_index) {}
  int stage;  // horizon stage where divergence happened, -1 if not applicable
};

/// A Newton-system backend failed (non-SPD block, non-finite solution).
struct BackendError : Error {
  explicit BackendError(const std::string& what, int stage_index = -1)
      : Error(what), stage(stage_index) {}
  int stage;
};

/// The IPM could not complete an iteration.
struct SolverFailureError : Error {
  SolverFailureError(const std::string& what, int iter) : Error(what), iteration(iter) {}
  int iteration;  // 1-based iteration at which the failure occurred
};

/// A property the algorithm certifies a priori was violated at run time.
/// Seeing this exception indicates a bug, not a bad problem instance.
struct InvariantViolationError : Error {
  using Error::Error;
};

/// A configuration document failed validation.
struct ConfigError : Error {
  ConfigError(const std::string& field_path, const std::string& msg)
      : Error("config error at " + field_path + ": " + msg), field(field_path) {}
  std::string field;
};

}  // namespace certnmpc
