#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "certnmpc/certify.hpp"
#include "certnmpc/condense.hpp"
#include "certnmpc/ipm.hpp"
#include "certnmpc/model.hpp"
#include "certnmpc/riccati.hpp"
#include "certnmpc/sensitivity.hpp"

namespace certnmpc {

/// Trajectory the next QP is linearized around: N+1 states, N inputs.
struct GuessTrajectory {
  std::vector<VectorXd> x;
  std::vector<VectorXd> u;
};

/// Tracking targets over one horizon: N+1 states (index 0 unused by the
/// cost), N inputs.
struct ReferenceTrajectory {
  std::vector<VectorXd> x;
  std::vector<VectorXd> u;
};

struct InputBounds {
  VectorXd lo;
  VectorXd hi;
};

struct SolveDiagnostics {
  int iterations = 0;
  double gap = 0.0;
  double h_inf = 0.0;
  std::int64_t prep_flops = 0;      // certified, this sampling period
  std::int64_t feedback_flops = 0;  // certified, this sampling period
};

struct ControlSolution {
  std::vector<VectorXd> x;  // N+1 states
  std::vector<VectorXd> u;  // N inputs, within bounds
  SolveDiagnostics diagnostics;
};

/// Everything computable before the measured state arrives. By construction
/// the feedback state is not a parameter anywhere in the preparation path.
struct PreparedData {
  CondensedProblem condensed;
  GuessTrajectory guess;
  ReferenceTrajectory refs;
  InputBounds bounds;
  IntegratorSpec integrator;
  certify::ProblemDims dims;       // eps filled in at feedback time
  std::int64_t prep_flops = 0;
};

/// Shifted warm start: states and inputs move one stage earlier, the last
/// input repeats, and the terminal state extends the trajectory by one RK4
/// sample.
GuessTrajectory shift(const ControlSolution& previous, const ModelDynamics& model,
                      const IntegratorSpec& spec);

/// Cold start for the first sampling period: roll the model forward from x0
/// under the clamped input reference, giving a dynamics-consistent guess
/// (all integration residuals vanish).
GuessTrajectory cold_start_guess(const ModelDynamics& model, const VectorXd& x0,
                                 const ReferenceTrajectory& refs, const InputBounds& bounds,
                                 const IntegratorSpec& spec, int horizon);

/// Preparation phase: sensitivities, input scaling, scaled dynamics, S and
/// g1. Everything here is independent of the measured state.
PreparedData prepare(const ModelDynamics& model, GuessTrajectory guess, ReferenceTrajectory refs,
                     const InputBounds& bounds, const Weights& weights, const IntegratorSpec& spec);

/// Feedback phase: finish the gradient (g2, h, stored back into
/// prepared.condensed), run the certified IPM for its exact iteration
/// count, recover inputs through the scaling map and states through the
/// defect recursion, and take the full Newton step on the guess. The
/// backend is bound to prepared.condensed internally.
ControlSolution feedback(PreparedData& prepared, const VectorXd& x_hat, double eps,
                         NewtonBackend& backend);

enum class BackendKind { kRiccati, kDense };

struct ControllerSettings {
  int horizon = 0;  // N
  IntegratorSpec integrator;
  Weights weights;
  InputBounds bounds;
  double eps = 1e-6;
  BackendKind backend = BackendKind::kRiccati;
};

/// Convenience orchestration of the prepare/feedback cycle for a closed
/// loop: owns the guess, shifts it from the previous solution, and keeps
/// the backend (and its workspace) alive across sampling periods.
/// One instance drives one control loop; prepare and feedback alternate.
class RtiController {
 public:
  RtiController(ModelDynamics model, ControllerSettings settings);

  /// Install the cold-start guess; call once before the first prepare.
  void start(const VectorXd& x0, ReferenceTrajectory refs);

  /// Reference for the upcoming sampling period.
  void set_reference(ReferenceTrajectory refs);

  /// Preparation phase. Shifts the guess from the previous solution first
  /// (after the first period).
  const PreparedData& prepare();

  /// Feedback phase for the measured state.
  ControlSolution feedback(const VectorXd& x_hat);

  const ControllerSettings& settings() const { return settings_; }
  const ModelDynamics& model() const { return model_; }

 private:
  ModelDynamics model_;
  ControllerSettings settings_;
  ReferenceTrajectory refs_;
  GuessTrajectory guess_;
  std::optional<ControlSolution> previous_;
  std::optional<PreparedData> prepared_;
  RiccatiBackend riccati_;
  DenseCholeskyBackend dense_;
  bool started_ = false;
};

}  // namespace certnmpc
