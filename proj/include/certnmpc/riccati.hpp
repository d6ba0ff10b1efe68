#pragma once

#include <Eigen/Cholesky>

#include <vector>

#include "certnmpc/condense.hpp"
#include "certnmpc/ipm.hpp"
#include "certnmpc/types.hpp"

namespace certnmpc {

/// One stage of the equivalent unconstrained LQR. Q is the state-weight
/// addend of this stage's Gram block (already scaled by 2 lambda / ||h||_inf;
/// the k = 0 entry is a filler that cannot influence the solution because
/// dx_0 = 0). R carries the scaled input weight plus the per-coordinate
/// dual diagonal; g is minus the stage slice of the Newton rhs.
struct LqrStage {
  MatrixXd A;
  MatrixXd B;
  MatrixXd Q;
  MatrixXd R;
  VectorXd g;
};

struct LqrProblem {
  std::vector<LqrStage> stages;
  MatrixXd Q_terminal;
};

struct RiccatiSolution {
  std::vector<VectorXd> du;  // N blocks; stacked, this is dz of the Newton system
  std::vector<VectorXd> dx;  // N+1 blocks, dx[0] = 0
};

/// Per-horizon factor storage, allocated once and reused across the
/// certified iteration loop; resize is a no-op when the dimensions are
/// unchanged, so steady-state solves never touch the allocator.
class RiccatiWorkspace {
 public:
  void resize(int horizon, int n_x, int n_u);

  std::vector<MatrixXd> Lambda;  // n_u x n_u lower Cholesky blocks
  std::vector<MatrixXd> M;       // n_x x n_u coupling blocks
  std::vector<VectorXd> q;       // feedforward terms
  MatrixXd L;                    // current cost-to-go factor, n_x x n_x lower
  MatrixXd W;                    // L' [B, A] scratch
  MatrixXd gram;                 // (n_u + n_x)^2 scratch
  MatrixXd F;                    // dense copy of the Gram Cholesky factor
  VectorXd p;                    // cost-to-go linear term
  VectorXd p_next;
  VectorXd t_u;                  // n_u scratch
  Eigen::LLT<MatrixXd> llt_gram{1};
  Eigen::LLT<MatrixXd> llt_term{1};

 private:
  int horizon_ = -1, n_x_ = -1, n_u_ = -1;
};

/// Factorized Riccati recursion. Backward sweep propagates the Cholesky
/// factor of the cost-to-go through one (n_u+n_x)-sized block Cholesky per
/// stage; the forward sweep rolls the solution out through the dynamics.
/// The stacked du solves (sigma H + diag(w)) dz = rhs for the LQR data
/// produced by assemble_stages.
///
/// Throws BackendError with the stage index when a block is not SPD.
void riccati_solve(const LqrProblem& problem, RiccatiWorkspace& ws, RiccatiSolution& out);
RiccatiSolution riccati_solve(const LqrProblem& problem);

/// Maps the condensed problem plus the current interior-point state onto
/// LQR stage data: Q blocks are (2 lambda / ||h||_inf) Wx (terminal WN),
/// R_k = (2 lambda / ||h||_inf) D Wu D + diag(weight slice k), g_k = -rhs
/// slice k. Requires problem.h_inf > 0.
LqrProblem assemble_stages(const CondensedProblem& problem, const IpmIterate& iterate,
                           const VectorXd& rhs);

/// NewtonBackend implementation running the factorized Riccati recursion;
/// O(N) block operations per iteration. Default controller backend.
class RiccatiBackend : public NewtonBackend {
 public:
  RiccatiBackend() = default;

  void bind(const CondensedProblem& problem) override;
  void prepare(double sigma) override;
  VectorXd solve(const VectorXd& weight, const VectorXd& rhs) override;
  int size() const override;

 private:
  const CondensedProblem* problem_ = nullptr;
  MatrixXd input_weight_;  // D Wu D
  LqrProblem lqr_;
  RiccatiWorkspace ws_;
  RiccatiSolution sol_;
  double sigma_ = 0.0;
};

}  // namespace certnmpc
