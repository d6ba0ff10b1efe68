#include "certnmpc/ipm.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace certnmpc {

int iteration_count(int n, double eps) {
  if (n < 1) throw std::invalid_argument("iteration_count: n must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("iteration_count: eps must be > 0");
  const double sqrt2n = std::sqrt(2.0 * n);
  const double num = std::log(2.0 * n / eps);
  const double den = -2.0 * std::log(sqrt2n / (sqrt2n + std::sqrt(2.0) - 1.0));
  long long k = static_cast<long long>(std::ceil(num / den));
  if (k < 0) k = 0;
  return static_cast<int>(k) + 1;
}

VectorXd IpmIterate::weight() const {
  return (gamma.array() / phi.array() + theta.array() / psi.array()).matrix();
}

double IpmIterate::duality_gap() const { return gamma.dot(phi) + theta.dot(psi); }

IpmIterate initialize(const VectorXd& h, double h_inf) {
  if (!(h_inf > 0.0)) throw std::invalid_argument("initialize: requires ||h||_inf > 0");
  const int n = static_cast<int>(h.size());
  IpmIterate it;
  it.lambda = 1.0 / std::sqrt(static_cast<double>(n) + 1.0);
  it.eta = (std::sqrt(2.0) - 1.0) / (std::sqrt(2.0 * n) + std::sqrt(2.0) - 1.0);
  it.tau = 1.0 / (1.0 - it.eta);
  const VectorXd h_tilde = h / h_inf;
  it.z = VectorXd::Zero(n);
  it.gamma = VectorXd::Ones(n) - it.lambda * h_tilde;
  it.theta = VectorXd::Ones(n) + it.lambda * h_tilde;
  it.phi = VectorXd::Ones(n);
  it.psi = VectorXd::Ones(n);
  return it;
}

VectorXd newton_rhs(const IpmIterate& it) {
  return 2.0 * ((it.theta.array() / it.psi.array()).sqrt() * it.tau -
                (it.gamma.array() / it.phi.array()).sqrt() * it.tau + it.gamma.array() -
                it.theta.array())
                   .matrix();
}

DualStep dual_updates(const IpmIterate& it, const VectorXd& dz) {
  DualStep step;
  const auto gp = it.gamma.array() / it.phi.array();
  const auto tp = it.theta.array() / it.psi.array();
  step.dgamma = (gp * dz.array() + 2.0 * (gp.sqrt() * it.tau - it.gamma.array())).matrix();
  step.dtheta = (-tp * dz.array() + 2.0 * (tp.sqrt() * it.tau - it.theta.array())).matrix();
  step.dphi = -dz;
  step.dpsi = dz;
  return step;
}

double proximity(const IpmIterate& it) {
  const auto beta_gamma = (it.gamma.array() * it.phi.array()).sqrt();
  const auto beta_theta = (it.theta.array() * it.psi.array()).sqrt();
  const double norm2 = (it.tau - beta_gamma).square().sum() + (it.tau - beta_theta).square().sum();
  return std::sqrt(norm2) / it.tau;
}

void DenseCholeskyBackend::set_matrix(MatrixXd H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("DenseCholeskyBackend: H must be square");
  H_ = std::move(H);
}

void DenseCholeskyBackend::bind(const CondensedProblem& problem) {
  set_matrix(build_H_oracle(problem.S, problem.weights, problem.scaling));
}

void DenseCholeskyBackend::prepare(double sigma) { scaled_ = sigma * H_; }

VectorXd DenseCholeskyBackend::solve(const VectorXd& weight, const VectorXd& rhs) {
  MatrixXd M = scaled_;
  M.diagonal() += weight;
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw BackendError("DenseCholeskyBackend: Newton matrix not positive definite");
  }
  return llt.solve(rhs);
}

BoxQpResult solve_box_qp(const VectorXd& h, double eps, NewtonBackend& backend,
                         const IterationCallback& callback) {
  const int n = static_cast<int>(h.size());
  if (n < 1) throw std::invalid_argument("solve_box_qp: empty problem");
  if (backend.size() != n) throw std::invalid_argument("solve_box_qp: backend/problem size mismatch");

  BoxQpResult result;
  result.h_inf = h.lpNorm<Eigen::Infinity>();
  if (result.h_inf == 0.0) {
    // h = 0 solves to z = 0 outright; the iteration machinery is never entered.
    result.z = VectorXd::Zero(n);
    return result;
  }

  IpmIterate it = initialize(h, result.h_inf);
  backend.prepare(2.0 * it.lambda / result.h_inf);

  const int total = iteration_count(n, eps);
  for (int i = 1; i <= total; ++i) {
    it.tau *= (1.0 - it.eta);
    const VectorXd w = it.weight();
    const VectorXd rhs = newton_rhs(it);
    VectorXd dz;
    try {
      dz = backend.solve(w, rhs);
    } catch (const BackendError& e) {
      throw SolverFailureError("solve_box_qp: backend failed at iteration " + std::to_string(i) +
                                   ": " + e.what(),
                               i);
    }
    if (!dz.allFinite()) {
      throw SolverFailureError("solve_box_qp: non-finite direction at iteration " + std::to_string(i),
                               i);
    }

    const DualStep step = dual_updates(it, dz);
    it.z += dz;
    it.gamma += step.dgamma;
    it.theta += step.dtheta;
    it.phi += step.dphi;
    it.psi += step.dpsi;
    ++result.iterations;

    if (it.gamma.minCoeff() <= 0.0 || it.theta.minCoeff() <= 0.0 || it.phi.minCoeff() <= 0.0 ||
        it.psi.minCoeff() <= 0.0) {
      // Lemma-level guarantee: the full step keeps the iterate strictly feasible.
      throw InvariantViolationError("solve_box_qp: positivity lost at iteration " +
                                    std::to_string(i));
    }

    if (callback) callback(IterationRecord{i, it.tau, w, rhs, dz, it});
  }

  result.z = std::move(it.z);
  result.gap = it.gamma.dot(it.phi) + it.theta.dot(it.psi);
  return result;
}

}  // namespace certnmpc
