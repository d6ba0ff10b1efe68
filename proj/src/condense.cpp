#include "certnmpc/condense.hpp"

#include <stdexcept>
#include <string>

namespace certnmpc {

InputScaling build_scaling(const VectorXd& u_lo, const VectorXd& u_hi,
                           std::span<const VectorXd> u_guess) {
  if (u_lo.size() != u_hi.size()) throw std::invalid_argument("build_scaling: bound size mismatch");
  for (Eigen::Index i = 0; i < u_lo.size(); ++i) {
    if (!(u_hi[i] > u_lo[i])) {
      throw InvalidBoundsError("build_scaling: u_hi <= u_lo in component " + std::to_string(i));
    }
  }
  InputScaling s;
  s.D = 0.5 * (u_hi - u_lo);
  const VectorXd mid = 0.5 * (u_hi + u_lo);
  s.d.reserve(u_guess.size());
  for (const VectorXd& ug : u_guess) s.d.push_back(mid - ug);
  return s;
}

std::vector<ScaledStage> scale_dynamics(std::span<const StageTriple> stages,
                                        const InputScaling& scaling) {
  if (stages.size() != scaling.d.size()) {
    throw std::invalid_argument("scale_dynamics: stage/scaling length mismatch");
  }
  std::vector<ScaledStage> out;
  out.reserve(stages.size());
  for (std::size_t k = 0; k < stages.size(); ++k) {
    ScaledStage s;
    s.A = stages[k].A;
    s.B = stages[k].B * scaling.D.asDiagonal();
    s.r = stages[k].r + stages[k].B * scaling.d[k];
    out.push_back(std::move(s));
  }
  return out;
}

MatrixXd build_S(std::span<const ScaledStage> stages) {
  const int N = static_cast<int>(stages.size());
  if (N < 1) throw std::invalid_argument("build_S: empty horizon");
  const int n_x = static_cast<int>(stages[0].A.rows());
  const int n_u = static_cast<int>(stages[0].B.cols());
  MatrixXd S = MatrixXd::Zero(N * n_x, N * n_u);
  S.topLeftCorner(n_x, n_u) = stages[0].B;
  for (int i = 1; i < N; ++i) {
    // block row i = A_i * block row (i-1), then the new diagonal block
    S.block(i * n_x, 0, n_x, i * n_u).noalias() =
        stages[i].A * S.block((i - 1) * n_x, 0, n_x, i * n_u);
    S.block(i * n_x, i * n_u, n_x, n_u) = stages[i].B;
  }
  return S;
}

VectorXd build_g1(std::span<const ScaledStage> stages, std::span<const VectorXd> x_guess,
                  std::span<const VectorXd> x_ref) {
  const std::size_t N = stages.size();
  if (x_guess.size() != N + 1 || x_ref.size() != N + 1) {
    throw std::invalid_argument("build_g1: need N+1 guess and reference states");
  }
  const int n_x = static_cast<int>(stages[0].A.rows());
  VectorXd g1(static_cast<Eigen::Index>(N) * n_x);
  VectorXd e = VectorXd::Zero(n_x);
  for (std::size_t k = 0; k < N; ++k) {
    e = stages[k].A * e + stages[k].r;
    g1.segment(static_cast<Eigen::Index>(k) * n_x, n_x) = x_guess[k + 1] - x_ref[k + 1] + e;
  }
  return g1;
}

VectorXd build_g2(std::span<const ScaledStage> stages, const VectorXd& x_hat,
                  const VectorXd& x_guess_0) {
  const std::size_t N = stages.size();
  const int n_x = static_cast<int>(stages[0].A.rows());
  VectorXd g2(static_cast<Eigen::Index>(N) * n_x);
  VectorXd w = x_hat - x_guess_0;
  for (std::size_t k = 0; k < N; ++k) {
    w = stages[k].A * w;
    g2.segment(static_cast<Eigen::Index>(k) * n_x, n_x) = w;
  }
  return g2;
}

// Qbar g, blockwise: Wx on blocks 0..N-2 (states 1..N-1), WN on the last.
static VectorXd apply_qbar(const VectorXd& g, const Weights& weights, int N, int n_x) {
  VectorXd out(g.size());
  for (int k = 0; k < N; ++k) {
    const auto block = g.segment(static_cast<Eigen::Index>(k) * n_x, n_x);
    out.segment(static_cast<Eigen::Index>(k) * n_x, n_x).noalias() =
        (k == N - 1 ? weights.WN : weights.Wx) * block;
  }
  return out;
}

std::pair<VectorXd, double> build_h(const MatrixXd& S, const VectorXd& g, const Weights& weights,
                                    const InputScaling& scaling, std::span<const VectorXd> u_ref,
                                    const VectorXd& u_lo, const VectorXd& u_hi) {
  const int N = static_cast<int>(u_ref.size());
  const int n_u = static_cast<int>(scaling.D.size());
  const int n_x = static_cast<int>(S.rows()) / N;
  if (S.cols() != static_cast<Eigen::Index>(N) * n_u || g.size() != S.rows()) {
    throw std::invalid_argument("build_h: dimension mismatch");
  }
  VectorXd h(static_cast<Eigen::Index>(N) * n_u);
  h.noalias() = S.transpose() * apply_qbar(g, weights, N, n_x);
  const VectorXd mid = 0.5 * (u_hi + u_lo);
  for (int k = 0; k < N; ++k) {
    h.segment(static_cast<Eigen::Index>(k) * n_u, n_u) +=
        scaling.D.asDiagonal() * (weights.Wu * (mid - u_ref[k]));
  }
  return {h, h.lpNorm<Eigen::Infinity>()};
}

MatrixXd build_H_oracle(const MatrixXd& S, const Weights& weights, const InputScaling& scaling) {
  const int n_u = static_cast<int>(scaling.D.size());
  const int N = static_cast<int>(S.cols()) / n_u;
  const int n_x = static_cast<int>(S.rows()) / N;

  MatrixXd QS(S.rows(), S.cols());
  for (int k = 0; k < N; ++k) {
    QS.middleRows(static_cast<Eigen::Index>(k) * n_x, n_x).noalias() =
        (k == N - 1 ? weights.WN : weights.Wx) * S.middleRows(static_cast<Eigen::Index>(k) * n_x, n_x);
  }
  MatrixXd M(S.cols(), S.cols());
  M.noalias() = S.transpose() * QS;

  MatrixXd H = 0.5 * (M + M.transpose());
  const MatrixXd Ru = scaling.D.asDiagonal() * weights.Wu * scaling.D.asDiagonal();
  const MatrixXd Ru_sym = 0.5 * (Ru + Ru.transpose());
  for (int k = 0; k < N; ++k) {
    H.block(static_cast<Eigen::Index>(k) * n_u, static_cast<Eigen::Index>(k) * n_u, n_u, n_u) +=
        Ru_sym;
  }
  return H;
}

}  // namespace certnmpc
