#pragma once

#include <span>
#include <vector>

#include "certnmpc/model.hpp"
#include "certnmpc/types.hpp"

namespace certnmpc {

/// Fixed-step RK4 discretization grid: N_s equal sub-steps per sampling
/// interval dt, each of length dt / N_s.
struct IntegratorSpec {
  double dt = 0.0;
  int substeps = 1;  // N_s

  double step_dt() const { return dt / static_cast<double>(substeps); }
  bool valid() const { return dt > 0.0 && substeps >= 1; }
};

/// Linearization of the discrete map F at one horizon stage:
/// A = dF/dx, B = dF/du, r = F(x_guess_k, u_guess_k) - x_guess_{k+1}.
struct StageTriple {
  MatrixXd A;
  MatrixXd B;
  VectorXd r;
};

/// One RK4 step of length t_i with zero-order-hold input.
VectorXd rk4_step(const ModelDynamics& model, const VectorXd& x, const VectorXd& u, double t_i);

/// The discrete-time map F: N_s composed RK4 steps across one sampling
/// interval, input held constant throughout.
VectorXd integrate_sample(const ModelDynamics& model, const VectorXd& x, const VectorXd& u,
                          const IntegratorSpec& spec);

/// Simultaneous integration of the state and its sensitivities over one
/// sampling interval. A starts at identity and B at zero; every RK4 stage
/// propagates the stacked [A, B] through the chain rule, so on return
/// A = dF/dx and B = dF/du at (x_guess_k, u_guess_k), and
/// r = F(x_guess_k, u_guess_k) - x_guess_k1.
///
/// Throws IntegrationDivergedError when any intermediate becomes non-finite.
StageTriple stage_sensitivities(const ModelDynamics& model, const VectorXd& x_guess_k,
                                const VectorXd& u_guess_k, const VectorXd& x_guess_k1,
                                const IntegratorSpec& spec);

/// stage_sensitivities at every stage of the horizon. x_guess has N+1
/// entries, u_guess has N. Divergence errors carry the failing stage index.
std::vector<StageTriple> horizon_sensitivities(const ModelDynamics& model,
                                               std::span<const VectorXd> x_guess,
                                               std::span<const VectorXd> u_guess,
                                               const IntegratorSpec& spec);

}  // namespace certnmpc
