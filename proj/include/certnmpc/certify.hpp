#pragma once

#include <array>
#include <cstdint>

namespace certnmpc::certify {

/// Dimensions and model costs the analytic certificate depends on.
/// Everything the flop totals need is here; nothing about the problem data
/// enters, which is what makes the certificate a-priori.
struct ProblemDims {
  int N = 0;    // prediction horizon length
  int n_x = 0;  // state dimension
  int n_u = 0;  // input dimension
  int N_s = 0;  // RK4 substeps per sample
  std::int64_t m_f = 0;
  std::int64_t m_fx = 0;
  std::int64_t m_fu = 0;
  double eps = 0.0;  // IPM stopping gap

  int n() const { return N * n_u; }
  bool valid() const { return N >= 1 && n_x >= 1 && n_u >= 1 && N_s >= 1 && m_f >= 0 &&
                              m_fx >= 0 && m_fu >= 0 && eps > 0.0; }
};

/// Flops to produce all N sensitivity triples (A, B, r) via the simultaneous
/// RK4 propagation.
std::int64_t flops_sensitivities(const ProblemDims& dims);

/// Flops of one factorized Riccati Newton solve (backward + forward sweep);
/// the 7/3 and 1/3 coefficients are evaluated in exact thirds and the total
/// rounded to the nearest integer.
std::int64_t flops_riccati(const ProblemDims& dims);

// Condensing-construction counts, queryable for analysis. flops_build_H
// covers the Hessian the controller path never forms.
std::int64_t flops_scale_dynamics(const ProblemDims& dims);
std::int64_t flops_build_S(const ProblemDims& dims);
std::int64_t flops_build_H(const ProblemDims& dims);
std::int64_t flops_build_g1(const ProblemDims& dims);
std::int64_t flops_build_g2(const ProblemDims& dims);
std::int64_t flops_build_h(const ProblemDims& dims);

struct Certificate {
  int iterations = 0;  // exact feedback-phase iteration count
  std::array<std::int64_t, 3> prep_steps{};      // shift, sensitivities, condense
  std::array<std::int64_t, 7> feedback_steps{};  // g2+h, zero test, init, loop, dx0, recover, step
  std::int64_t prep_flops = 0;
  std::int64_t feedback_flops = 0;
  double flops_per_sec = 0.0;
  double estimated_time_s = 0.0;
};

/// Evaluates the full per-step flop model for one sampling period and
/// converts it to time at the given processing rate. Totals are exact sums
/// of the step breakdowns.
Certificate certify(const ProblemDims& dims, double flops_per_sec);

}  // namespace certnmpc::certify
