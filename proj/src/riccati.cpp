#include "certnmpc/riccati.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>
#include <string>

namespace certnmpc {

void RiccatiWorkspace::resize(int horizon, int n_x, int n_u) {
  if (horizon == horizon_ && n_x == n_x_ && n_u == n_u_) return;
  Lambda.assign(horizon, MatrixXd(n_u, n_u));
  M.assign(horizon, MatrixXd(n_x, n_u));
  q.assign(horizon, VectorXd(n_u));
  L.resize(n_x, n_x);
  W.resize(n_x, n_u + n_x);
  gram.resize(n_u + n_x, n_u + n_x);
  F.resize(n_u + n_x, n_u + n_x);
  p.resize(n_x);
  p_next.resize(n_x);
  t_u.resize(n_u);
  llt_gram = Eigen::LLT<MatrixXd>(n_u + n_x);
  llt_term = Eigen::LLT<MatrixXd>(n_x);
  horizon_ = horizon;
  n_x_ = n_x;
  n_u_ = n_u;
}

void riccati_solve(const LqrProblem& problem, RiccatiWorkspace& ws, RiccatiSolution& out) {
  const int N = static_cast<int>(problem.stages.size());
  if (N < 1) throw std::invalid_argument("riccati_solve: empty horizon");
  const int n_x = static_cast<int>(problem.stages[0].A.rows());
  const int n_u = static_cast<int>(problem.stages[0].B.cols());
  ws.resize(N, n_x, n_u);

  // Backward sweep: L carries chol(P_{k+1}) entering stage k.
  ws.llt_term.compute(problem.Q_terminal);
  if (ws.llt_term.info() != Eigen::Success) {
    throw BackendError("riccati_solve: terminal weight not SPD", N);
  }
  ws.L = ws.llt_term.matrixL();
  ws.p.setZero();

  for (int k = N - 1; k >= 0; --k) {
    const LqrStage& st = problem.stages[k];
    ws.W.leftCols(n_u).noalias() = ws.L.transpose() * st.B;
    ws.W.rightCols(n_x).noalias() = ws.L.transpose() * st.A;

    ws.gram.noalias() = ws.W.transpose() * ws.W;
    ws.gram.topLeftCorner(n_u, n_u) += st.R;
    ws.gram.bottomRightCorner(n_x, n_x) += st.Q;

    ws.llt_gram.compute(ws.gram);
    if (ws.llt_gram.info() != Eigen::Success) {
      throw BackendError("riccati_solve: Gram block not SPD at stage " + std::to_string(k), k);
    }
    ws.F = ws.llt_gram.matrixL();
    ws.Lambda[k] = ws.F.topLeftCorner(n_u, n_u);
    ws.M[k] = ws.F.bottomLeftCorner(n_x, n_u);
    ws.L = ws.F.bottomRightCorner(n_x, n_x);  // chol(P_k)

    // q_k = (Lambda Lambda')^{-1} (B' p_{k+1} + g_k) via two triangular solves
    ws.t_u.noalias() = st.B.transpose() * ws.p;
    ws.t_u += st.g;
    ws.Lambda[k].triangularView<Eigen::Lower>().solveInPlace(ws.t_u);
    ws.Lambda[k].transpose().triangularView<Eigen::Upper>().solveInPlace(ws.t_u);
    ws.q[k] = ws.t_u;

    // p_k = A' p_{k+1} - M Lambda' q_k
    ws.t_u.noalias() = ws.Lambda[k].transpose() * ws.q[k];
    ws.p_next.noalias() = st.A.transpose() * ws.p;
    ws.p_next.noalias() -= ws.M[k] * ws.t_u;
    ws.p.swap(ws.p_next);
  }

  // Forward sweep from dx_0 = 0.
  if (static_cast<int>(out.du.size()) != N || out.du[0].size() != n_u) {
    out.du.assign(N, VectorXd(n_u));
  }
  if (static_cast<int>(out.dx.size()) != N + 1 || out.dx[0].size() != n_x) {
    out.dx.assign(N + 1, VectorXd(n_x));
  }
  out.dx[0].setZero();
  for (int k = 0; k < N; ++k) {
    const LqrStage& st = problem.stages[k];
    ws.t_u.noalias() = ws.M[k].transpose() * out.dx[k];
    ws.Lambda[k].transpose().triangularView<Eigen::Upper>().solveInPlace(ws.t_u);
    out.du[k] = -ws.t_u - ws.q[k];
    out.dx[k + 1].noalias() = st.A * out.dx[k];
    out.dx[k + 1].noalias() += st.B * out.du[k];
  }
}

RiccatiSolution riccati_solve(const LqrProblem& problem) {
  RiccatiWorkspace ws;
  RiccatiSolution out;
  riccati_solve(problem, ws, out);
  return out;
}

LqrProblem assemble_stages(const CondensedProblem& problem, const IpmIterate& iterate,
                           const VectorXd& rhs) {
  if (!(problem.h_inf > 0.0)) {
    throw std::invalid_argument("assemble_stages: requires ||h||_inf > 0");
  }
  const int N = problem.horizon();
  const int n_u = problem.n_u();
  const double sigma = 2.0 * iterate.lambda / problem.h_inf;
  const VectorXd w = iterate.weight();
  const MatrixXd input_weight =
      problem.scaling.D.asDiagonal() * problem.weights.Wu * problem.scaling.D.asDiagonal();

  LqrProblem lqr;
  lqr.stages.resize(N);
  lqr.Q_terminal = sigma * problem.weights.WN;
  for (int k = 0; k < N; ++k) {
    LqrStage& st = lqr.stages[k];
    st.A = problem.stages[k].A;
    st.B = problem.stages[k].B;
    st.Q = sigma * problem.weights.Wx;  // k = 0 entry is the dx_0 = 0 filler
    st.R = sigma * input_weight;
    st.R.diagonal() += w.segment(static_cast<Eigen::Index>(k) * n_u, n_u);
    st.g = -rhs.segment(static_cast<Eigen::Index>(k) * n_u, n_u);
  }
  return lqr;
}

void RiccatiBackend::bind(const CondensedProblem& problem) {
  problem_ = &problem;
  const int N = problem.horizon();
  const int n_x = problem.n_x();
  const int n_u = problem.n_u();
  input_weight_ =
      problem.scaling.D.asDiagonal() * problem.weights.Wu * problem.scaling.D.asDiagonal();
  lqr_.stages.resize(N);
  for (int k = 0; k < N; ++k) {
    lqr_.stages[k].A = problem.stages[k].A;
    lqr_.stages[k].B = problem.stages[k].B;
  }
  ws_.resize(N, n_x, n_u);
}

void RiccatiBackend::prepare(double sigma) {
  if (problem_ == nullptr) throw std::logic_error("RiccatiBackend: prepare before bind");
  sigma_ = sigma;
  lqr_.Q_terminal = sigma * problem_->weights.WN;
  const MatrixXd q_running = sigma * problem_->weights.Wx;
  const MatrixXd r_base = sigma * input_weight_;
  for (auto& st : lqr_.stages) {
    st.Q = q_running;
    st.R = r_base;
  }
}

VectorXd RiccatiBackend::solve(const VectorXd& weight, const VectorXd& rhs) {
  const int N = static_cast<int>(lqr_.stages.size());
  const int n_u = problem_->n_u();
  for (int k = 0; k < N; ++k) {
    LqrStage& st = lqr_.stages[k];
    st.R = sigma_ * input_weight_;
    st.R.diagonal() += weight.segment(static_cast<Eigen::Index>(k) * n_u, n_u);
    st.g = -rhs.segment(static_cast<Eigen::Index>(k) * n_u, n_u);
  }
  riccati_solve(lqr_, ws_, sol_);
  VectorXd dz(static_cast<Eigen::Index>(N) * n_u);
  for (int k = 0; k < N; ++k) dz.segment(static_cast<Eigen::Index>(k) * n_u, n_u) = sol_.du[k];
  return dz;
}

int RiccatiBackend::size() const { return problem_ == nullptr ? 0 : problem_->n(); }

}  // namespace certnmpc
