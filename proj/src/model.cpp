#include "certnmpc/model.hpp"

#include <cmath>

namespace certnmpc {

VectorXd lorenz_f(const VectorXd& state, const VectorXd& input, const LorenzParams& params) {
  const double x = state[0], y = state[1], z = state[2];
  VectorXd out(3);
  out[0] = params.sigma * (y - x) + input[0];
  out[1] = x * (params.rho - z) - y + input[1];
  out[2] = x * y - params.beta * z + input[2];
  return out;
}

std::pair<MatrixXd, MatrixXd> lorenz_jacobians(const VectorXd& state, const LorenzParams& params) {
  const double x = state[0], y = state[1], z = state[2];
  MatrixXd fx(3, 3);
  fx << -params.sigma, params.sigma, 0.0,
        params.rho - z, -1.0, -x,
        y, x, -params.beta;
  return {fx, MatrixXd::Identity(3, 3)};
}

VectorXd lorenz_attractor(const LorenzParams& params) {
  const double w = std::sqrt(params.beta * (params.rho - 1.0));
  VectorXd a(3);
  a << w, w, params.rho - 1.0;
  return a;
}

ModelDynamics make_lorenz(const LorenzParams& params) {
  ModelDynamics m;
  m.n_x = 3;
  m.n_u = 3;
  m.f = [params](const VectorXd& x, const VectorXd& u) { return lorenz_f(x, u, params); };
  m.f_x = [params](const VectorXd& x, const VectorXd&) { return lorenz_jacobians(x, params).first; };
  m.f_u = [](const VectorXd&, const VectorXd&) { return MatrixXd::Identity(3, 3); };
  // Only 4 entries of f_x vary with the state; f_u is constant.
  m.m_f = 10;
  m.m_fx = 4;
  m.m_fu = 0;
  m.name = "lorenz";
  return m;
}

ModelDynamics make_double_integrator() {
  ModelDynamics m;
  m.n_x = 2;
  m.n_u = 1;
  m.f = [](const VectorXd& x, const VectorXd& u) {
    VectorXd out(2);
    out[0] = x[1];
    out[1] = u[0];
    return out;
  };
  m.f_x = [](const VectorXd&, const VectorXd&) {
    MatrixXd fx = MatrixXd::Zero(2, 2);
    fx(0, 1) = 1.0;
    return fx;
  };
  m.f_u = [](const VectorXd&, const VectorXd&) {
    MatrixXd fu = MatrixXd::Zero(2, 1);
    fu(1, 0) = 1.0;
    return fu;
  };
  m.m_f = 0;
  m.m_fx = 0;
  m.m_fu = 0;
  m.name = "double_integrator";
  return m;
}

}  // namespace certnmpc
