#include "certnmpc/sensitivity.hpp"

#include <stdexcept>
#include <string>

namespace certnmpc {

VectorXd rk4_step(const ModelDynamics& model, const VectorXd& x, const VectorXd& u, double t_i) {
  if (!(t_i > 0.0)) throw std::invalid_argument("rk4_step: step length must be positive");
  const VectorXd k1 = model.f(x, u);
  const VectorXd k2 = model.f(x + 0.5 * t_i * k1, u);
  const VectorXd k3 = model.f(x + 0.5 * t_i * k2, u);
  const VectorXd k4 = model.f(x + t_i * k3, u);
  VectorXd next = x + (t_i / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw IntegrationDivergedError("rk4_step: non-finite state");
  return next;
}

VectorXd integrate_sample(const ModelDynamics& model, const VectorXd& x, const VectorXd& u,
                          const IntegratorSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("integrate_sample: invalid integrator spec");
  const double t_i = spec.step_dt();
  VectorXd state = x;
  for (int j = 0; j < spec.substeps; ++j) state = rk4_step(model, state, u, t_i);
  return state;
}

StageTriple stage_sensitivities(const ModelDynamics& model, const VectorXd& x_guess_k,
                                const VectorXd& u_guess_k, const VectorXd& x_guess_k1,
                                const IntegratorSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("stage_sensitivities: invalid integrator spec");
  const int n_x = model.n_x;
  const int n_u = model.n_u;
  const double t_i = spec.step_dt();

  VectorXd x = x_guess_k;
  const VectorXd& u = u_guess_k;
  MatrixXd A = MatrixXd::Identity(n_x, n_x);
  MatrixXd B = MatrixXd::Zero(n_x, n_u);

  VectorXd k1(n_x), k2(n_x), k3(n_x), k4(n_x);
  MatrixXd kx1(n_x, n_x), kx2(n_x, n_x), kx3(n_x, n_x), kx4(n_x, n_x);
  MatrixXd ku1(n_x, n_u), ku2(n_x, n_u), ku3(n_x, n_u), ku4(n_x, n_u);

  for (int j = 0; j < spec.substeps; ++j) {
    k1 = model.f(x, u);
    {
      const MatrixXd fx = model.f_x(x, u);
      kx1.noalias() = fx * A;
      ku1.noalias() = fx * B;
      ku1 += model.f_u(x, u);
    }
    const VectorXd x2 = x + 0.5 * t_i * k1;
    k2 = model.f(x2, u);
    {
      const MatrixXd fx = model.f_x(x2, u);
      kx2.noalias() = fx * (A + 0.5 * t_i * kx1);
      ku2.noalias() = fx * (B + 0.5 * t_i * ku1);
      ku2 += model.f_u(x2, u);
    }
    const VectorXd x3 = x + 0.5 * t_i * k2;
    k3 = model.f(x3, u);
    {
      const MatrixXd fx = model.f_x(x3, u);
      kx3.noalias() = fx * (A + 0.5 * t_i * kx2);
      ku3.noalias() = fx * (B + 0.5 * t_i * ku2);
      ku3 += model.f_u(x3, u);
    }
    const VectorXd x4 = x + t_i * k3;
    k4 = model.f(x4, u);
    {
      const MatrixXd fx = model.f_x(x4, u);
      kx4.noalias() = fx * (A + t_i * kx3);
      ku4.noalias() = fx * (B + t_i * ku3);
      ku4 += model.f_u(x4, u);
    }

    x += (t_i / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    A += (t_i / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    B += (t_i / 6.0) * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);

    if (!x.allFinite() || !A.allFinite() || !B.allFinite()) {
      throw IntegrationDivergedError("stage_sensitivities: non-finite intermediate at substep " +
                                     std::to_string(j));
    }
  }

  StageTriple out;
  out.A = std::move(A);
  out.B = std::move(B);
  out.r = x - x_guess_k1;
  return out;
}

std::vector<StageTriple> horizon_sensitivities(const ModelDynamics& model,
                                               std::span<const VectorXd> x_guess,
                                               std::span<const VectorXd> u_guess,
                                               const IntegratorSpec& spec) {
  if (x_guess.size() != u_guess.size() + 1) {
    throw std::invalid_argument("horizon_sensitivities: need N+1 states and N inputs");
  }
  const std::size_t horizon = u_guess.size();
  std::vector<StageTriple> stages;
  stages.reserve(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    try {
      stages.push_back(stage_sensitivities(model, x_guess[k], u_guess[k], x_guess[k + 1], spec));
    } catch (const IntegrationDivergedError& e) {
      throw IntegrationDivergedError("stage " + std::to_string(k) + ": " + e.what(),
                                     static_cast<int>(k));
    }
  }
  return stages;
}

}  // namespace certnmpc
