#include "certnmpc/certify.hpp"

#include <stdexcept>

#include "certnmpc/ipm.hpp"

namespace certnmpc::certify {

namespace {

using I = std::int64_t;

void check(const ProblemDims& d) {
  if (!d.valid()) throw std::invalid_argument("certify: invalid problem dimensions");
}

// Round an exact count expressed in thirds to the nearest integer.
// The remainder is 0, 1 or 2, so ties never occur.
I round_thirds(I thirds) { return thirds / 3 + (thirds % 3 == 2 ? 1 : 0); }

// One Riccati Newton solve, in thirds.
I riccati_thirds(const ProblemDims& d) {
  const I N = d.N, nx = d.n_x, nu = d.n_u;
  const I cubic = N * (7 * nx * nx * nx + 12 * nx * nx * nu + 6 * nx * nu * nu + nu * nu * nu);
  const I quad = N * (8 * nx * nx + 8 * nx * nu + 2 * nu * nu);
  return cubic + 3 * quad;
}

}  // namespace

std::int64_t flops_sensitivities(const ProblemDims& d) {
  check(d);
  const I N = d.N, nx = d.n_x, nu = d.n_u, Ns = d.N_s;
  const I per_substep = 4 * d.m_f + 4 * d.m_fx + 4 * d.m_fu + 8 * nx * nx * nx +
                        8 * nx * nx * nu + 10 * nx * nx + 10 * nx * nu + 16 * nx;
  return N * (nx + nu + Ns * per_substep + nx * nx + nx * nu + nx);
}

std::int64_t flops_riccati(const ProblemDims& d) {
  check(d);
  return round_thirds(riccati_thirds(d));
}

std::int64_t flops_scale_dynamics(const ProblemDims& d) {
  check(d);
  return static_cast<I>(d.N) * (3 * static_cast<I>(d.n_x) * d.n_u + d.n_x);
}

std::int64_t flops_build_S(const ProblemDims& d) {
  check(d);
  const I N = d.N;
  return (N * N - N) * d.n_x * d.n_u * d.n_u;
}

std::int64_t flops_build_H(const ProblemDims& d) {
  check(d);
  const I N = d.N, nx = d.n_x, nu = d.n_u;
  return (2 * N * N * N + N * N + N) * nx * nx * nu + N * nu * nu;
}

std::int64_t flops_build_g1(const ProblemDims& d) {
  check(d);
  const I N = d.N, nx = d.n_x;
  return 2 * N * nx + 2 * (N - 1) * nx * nx;
}

std::int64_t flops_build_g2(const ProblemDims& d) {
  check(d);
  const I N = d.N, nx = d.n_x;
  return nx + 2 * N * nx * nx;
}

std::int64_t flops_build_h(const ProblemDims& d) {
  check(d);
  const I N = d.N, nx = d.n_x, nu = d.n_u;
  return 2 * N * nx * nx + (N * N + N) * nx * nu + (N * N - N) * nx + nu + N * (2 * nu + nu * nu);
}

Certificate certify(const ProblemDims& d, double flops_per_sec) {
  check(d);
  if (!(flops_per_sec > 0.0)) throw std::invalid_argument("certify: flops_per_sec must be > 0");
  const I N = d.N, nx = d.n_x, nu = d.n_u;

  Certificate cert;
  cert.iterations = iteration_count(d.n(), d.eps);
  cert.flops_per_sec = flops_per_sec;

  cert.prep_steps[0] = N * nx + N * nu + d.m_f;
  cert.prep_steps[1] = flops_sensitivities(d);
  cert.prep_steps[2] = nu + N * nu + N * (2 * nx * nu + nx) + (N * N - N) * nx * nu * nu +
                       2 * N * nx + 2 * (N - 1) * nx * nx;

  cert.feedback_steps[0] = nx + 4 * N * nx * nx + (N * N + N) * nx * nu + (N * N - N) * nx + nu +
                           N * (2 * nu + nu * nu);
  cert.feedback_steps[1] = N * nu;
  cert.feedback_steps[2] = 5 * N * nu + 3;
  // Iteration loop: the only fractional term; everything else in the loop
  // body is integral, so rounding here equals rounding the phase total.
  cert.feedback_steps[3] = round_thirds(
      static_cast<I>(cert.iterations) * (3 * (1 + 15 * N * nu + 5 * nx) + riccati_thirds(d)));
  cert.feedback_steps[4] = nx;
  cert.feedback_steps[5] = N * (2 * nu + nx * nx + nx * nu + 2 * nx);
  cert.feedback_steps[6] = (N + 1) * (nx + nu);

  for (const I v : cert.prep_steps) cert.prep_flops += v;
  for (const I v : cert.feedback_steps) cert.feedback_flops += v;
  cert.estimated_time_s =
      static_cast<double>(cert.prep_flops + cert.feedback_flops) / flops_per_sec;
  return cert;
}

}  // namespace certnmpc::certify
