#pragma once

#include <span>
#include <utility>
#include <vector>

#include "certnmpc/sensitivity.hpp"
#include "certnmpc/types.hpp"

namespace certnmpc {

/// Affine change of variables mapping the unit box to the input box:
/// u = D z + d_k + u_guess_k with z in [-e, e].
struct InputScaling {
  VectorXd D;               // diagonal entries (u_hi - u_lo) / 2, all > 0
  std::vector<VectorXd> d;  // d_k = (u_hi + u_lo) / 2 - u_guess_k
};

/// Stage dynamics after input scaling: x_{k+1} = A x_k + B z_k + r with
/// B = B_raw D and r = r_raw + B_raw d_k.
struct ScaledStage {
  MatrixXd A;
  MatrixXd B;
  VectorXd r;
};

/// Quadratic cost weights; symmetric positive definite.
struct Weights {
  MatrixXd Wx;  // running state weight
  MatrixXd WN;  // terminal state weight
  MatrixXd Wu;  // input weight
};

/// The condensed unit-box QP pieces. S, g1 and the scaled stages are
/// feedback-state independent; g2, h, h_inf are filled once the measured
/// state arrives. The Hessian H = Rbar + S' Qbar S is deliberately absent:
/// it is only ever formed by the test oracle.
struct CondensedProblem {
  std::vector<ScaledStage> stages;
  InputScaling scaling;
  Weights weights;
  MatrixXd S;    // (N n_x) x (N n_u), block lower triangular
  VectorXd g1;   // N n_x
  VectorXd g2;   // N n_x
  VectorXd h;    // n = N n_u
  double h_inf = 0.0;

  int horizon() const { return static_cast<int>(stages.size()); }
  int n_x() const { return stages.empty() ? 0 : static_cast<int>(stages.front().A.rows()); }
  int n_u() const { return stages.empty() ? 0 : static_cast<int>(stages.front().B.cols()); }
  int n() const { return horizon() * n_u(); }
};

/// Throws InvalidBoundsError unless u_hi > u_lo componentwise.
InputScaling build_scaling(const VectorXd& u_lo, const VectorXd& u_hi,
                           std::span<const VectorXd> u_guess);

std::vector<ScaledStage> scale_dynamics(std::span<const StageTriple> stages,
                                        const InputScaling& scaling);

/// Block (i,k) is A_i ... A_{k+1} B_k for k <= i. Built by the forward
/// recursion block-row(i) = A_i block-row(i-1), never by repeated products.
MatrixXd build_S(std::span<const ScaledStage> stages);

/// Stacked (x_guess_{k+1} - x_ref_{k+1}) plus the chained residual rollout
/// e_{k+1} = A_k e_k + r_k from e_0 = 0. x_guess and x_ref have N+1 entries.
VectorXd build_g1(std::span<const ScaledStage> stages, std::span<const VectorXd> x_guess,
                  std::span<const VectorXd> x_ref);

/// Block k is A_k ... A_0 (x_hat - x_guess_0), by the rollout w <- A_k w.
VectorXd build_g2(std::span<const ScaledStage> stages, const VectorXd& x_hat,
                  const VectorXd& x_guess_0);

/// Gradient of the unit-box QP, h = S' Qbar (g1 + g2) + col_k(D Wu (mid - u_ref_k))
/// with mid = (u_hi + u_lo) / 2, and its infinity norm.
std::pair<VectorXd, double> build_h(const MatrixXd& S, const VectorXd& g, const Weights& weights,
                                    const InputScaling& scaling, std::span<const VectorXd> u_ref,
                                    const VectorXd& u_lo, const VectorXd& u_hi);

/// Dense Hessian H = Rbar + S' Qbar S, exactly symmetric. Test oracle and
/// dense-backend use only; the controller path never forms it.
MatrixXd build_H_oracle(const MatrixXd& S, const Weights& weights, const InputScaling& scaling);

}  // namespace certnmpc
