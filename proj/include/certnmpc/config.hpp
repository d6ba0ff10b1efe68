#pragma once

#include <cstdint>
#include <string>

#include "certnmpc/certify.hpp"
#include "certnmpc/model.hpp"
#include "certnmpc/rti.hpp"

namespace certnmpc {

/// A closed-loop experiment description, loaded from a single JSON document.
/// Weight matrices accept a diagonal shorthand (vector) or a full row-major
/// matrix; references accept a constant vector or a per-step sequence.
struct SimConfig {
  std::string model_name;
  LorenzParams lorenz_params;  // used when model_name == "lorenz"

  double dt = 0.0;
  double T_p = 0.0;  // prediction horizon time; N = T_p / dt
  int N_s = 1;
  double sim_duration = 0.0;

  VectorXd x0;
  std::vector<VectorXd> x_ref;  // length 1 = constant, else per sim step
  std::vector<VectorXd> u_ref;
  VectorXd u_lo, u_hi;
  Weights weights;
  double eps = 1e-6;
  double flops_per_sec = 1e9;
  std::uint64_t seed = 0;

  int horizon = 0;    // derived: T_p / dt
  int sim_steps = 0;  // derived: floor(sim_duration / dt)

  ModelDynamics make_model() const;
  certify::ProblemDims dims() const;

  /// Horizon references at simulation step `step` (per-step sequences are
  /// clamped at their last entry).
  ReferenceTrajectory reference_at(int step) const;
};

/// Parse and validate. Throws ConfigError carrying the offending field path.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);

}  // namespace certnmpc
