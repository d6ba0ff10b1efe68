#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "certnmpc/types.hpp"

namespace certnmpc {

/// Continuous-time dynamics x' = f(x, u) together with analytic Jacobians
/// and the per-evaluation flop counts used by the execution-time certifier.
///
/// All three evaluators are pure functions of their arguments and may be
/// called concurrently from any number of threads.
struct ModelDynamics {
  int n_x = 0;
  int n_u = 0;

  std::function<VectorXd(const VectorXd& x, const VectorXd& u)> f;
  std::function<MatrixXd(const VectorXd& x, const VectorXd& u)> f_x;
  std::function<MatrixXd(const VectorXd& x, const VectorXd& u)> f_u;

  // Declared flop counts per evaluation; constants of the model, not of
  // the evaluation point.
  std::int64_t m_f = 0;
  std::int64_t m_fx = 0;
  std::int64_t m_fu = 0;

  std::string name;
};

/// Parameters of the Lorenz system. Defaults give the classic chaotic regime
/// with strange attractors at (+-sqrt(beta(rho-1)), +-sqrt(beta(rho-1)), rho-1).
struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

/// Flux of the input-affine Lorenz system:
///   x' = sigma (y - x) + u_x
///   y' = x (rho - z) - y + u_y
///   z' = x y - beta z + u_z
VectorXd lorenz_f(const VectorXd& state, const VectorXd& input, const LorenzParams& params);

/// Analytic Jacobians of lorenz_f. f_u is the 3x3 identity (each input
/// forces one coordinate).
std::pair<MatrixXd, MatrixXd> lorenz_jacobians(const VectorXd& state, const LorenzParams& params);

/// One of the two strange attractors, (6*sqrt(2), 6*sqrt(2), 27) for the
/// default parameters; an equilibrium of the unforced flux.
VectorXd lorenz_attractor(const LorenzParams& params = {});

ModelDynamics make_lorenz(const LorenzParams& params = {});

/// Linear double integrator (n_x = 2, n_u = 1): x1' = x2, x2' = u.
/// RK4 is exact on it, so sensitivities have closed forms, which makes it
/// the reference model for oracle-free integration tests.
ModelDynamics make_double_integrator();

}  // namespace certnmpc
