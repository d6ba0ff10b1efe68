#pragma once

#include <functional>

#include "certnmpc/condense.hpp"
#include "certnmpc/types.hpp"

namespace certnmpc {

/// Exact number of path-following iterations for a unit-box QP of
/// dimension n and stopping gap eps. Data independent:
///   ceil( log(2n/eps) / (-2 log( sqrt(2n) / (sqrt(2n)+sqrt(2)-1) )) ) + 1,
/// with the ceiling term clamped at 0 so degenerate eps >= 2n still gives 1.
int iteration_count(int n, double eps);

/// Strictly feasible interior-point state for the scaled unit-box QP.
/// Invariants maintained by a full step: gamma, theta, phi, psi > 0,
/// z + phi = e and z - psi = -e exactly.
struct IpmIterate {
  VectorXd z;
  VectorXd gamma;  // dual of z <=  e
  VectorXd theta;  // dual of z >= -e
  VectorXd phi;    // slack e - z
  VectorXd psi;    // slack z + e
  double tau = 0.0;
  double lambda = 0.0;  // 1 / sqrt(n + 1)
  double eta = 0.0;     // (sqrt(2) - 1) / (sqrt(2n) + sqrt(2) - 1)

  int n() const { return static_cast<int>(z.size()); }

  /// Diagonal of the Newton system, gamma/phi + theta/psi.
  VectorXd weight() const;

  /// Duality gap v's = gamma'phi + theta'psi.
  double duality_gap() const;
};

/// Cost-free strictly feasible start: z = 0, gamma = e - lambda h~,
/// theta = e + lambda h~, phi = psi = e, tau = 1/(1-eta), where
/// h~ = h / h_inf. Requires h_inf > 0; the h = 0 case never reaches here
/// (solve_box_qp short-circuits it to z = 0).
IpmIterate initialize(const VectorXd& h, double h_inf);

/// Right-hand side of the compact Newton system:
/// 2 (sqrt(theta/psi) tau - sqrt(gamma/phi) tau + gamma - theta).
VectorXd newton_rhs(const IpmIterate& iterate);

struct DualStep {
  VectorXd dgamma;
  VectorXd dtheta;
  VectorXd dphi;  // = -dz
  VectorXd dpsi;  // = +dz
};

/// Dual and slack directions induced by the primal direction dz.
DualStep dual_updates(const IpmIterate& iterate, const VectorXd& dz);

/// Central-path proximity xi = ||tau e - sqrt(v s)|| / tau with
/// v = col(gamma, theta), s = col(phi, psi). Stays <= 1/sqrt(2) throughout.
double proximity(const IpmIterate& iterate);

/// Solver for the per-iteration Newton system
///   (sigma H + diag(w)) dz = rhs,  sigma = 2 lambda / ||h||_inf.
/// Problem structure is bound once; only w and rhs change per iteration.
class NewtonBackend {
 public:
  virtual ~NewtonBackend() = default;

  /// Attach the condensed problem this backend will solve against.
  /// The referenced data must outlive subsequent solve() calls.
  virtual void bind(const CondensedProblem& problem) = 0;

  /// Fix the objective scale sigma for the coming solve.
  virtual void prepare(double sigma) = 0;

  virtual VectorXd solve(const VectorXd& weight, const VectorXd& rhs) = 0;

  virtual int size() const = 0;
};

/// Reference backend: forms sigma H + diag(w) densely and factors it with
/// Cholesky every iteration. Used by the solve-qp CLI path and as the
/// cross-check oracle for the Riccati backend.
class DenseCholeskyBackend : public NewtonBackend {
 public:
  DenseCholeskyBackend() = default;
  explicit DenseCholeskyBackend(MatrixXd H) { set_matrix(std::move(H)); }

  /// Use an explicit dense Hessian (standalone Box-QP path).
  void set_matrix(MatrixXd H);

  void bind(const CondensedProblem& problem) override;
  void prepare(double sigma) override;
  VectorXd solve(const VectorXd& weight, const VectorXd& rhs) override;
  int size() const override { return static_cast<int>(H_.rows()); }

 private:
  MatrixXd H_;
  MatrixXd scaled_;
};

/// Everything a per-iteration observer can see. `weight` and `rhs` are the
/// Newton system of this iteration, `dz` the backend's solution, `iterate`
/// the state after the full step was taken.
struct IterationRecord {
  int iteration;  // 1-based
  double tau;
  const VectorXd& weight;
  const VectorXd& rhs;
  const VectorXd& dz;
  const IpmIterate& iterate;
};
using IterationCallback = std::function<void(const IterationRecord&)>;

struct BoxQpResult {
  VectorXd z;
  int iterations = 0;
  double gap = 0.0;    // final v's (scaled problem)
  double h_inf = 0.0;
};

/// Certified solve of min 1/2 z'Hz + h'z over [-e, e]. Runs exactly
/// iteration_count(n, eps) full Newton steps — no early exit — unless
/// ||h||_inf = 0, in which case the solution is z = 0 and no iteration runs.
/// The backend must already be bound to the problem whose gradient is h.
BoxQpResult solve_box_qp(const VectorXd& h, double eps, NewtonBackend& backend,
                         const IterationCallback& callback = {});

}  // namespace certnmpc
