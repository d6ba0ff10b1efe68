#include <doctest.h>

#include <cmath>

#include "certnmpc/certify.hpp"
#include "certnmpc/ipm.hpp"

using namespace certnmpc;
using certnmpc::certify::ProblemDims;

namespace {

ProblemDims lorenz_dims() {
  ProblemDims d;
  d.N = 20;
  d.n_x = 3;
  d.n_u = 3;
  d.N_s = 2;
  d.m_f = 10;
  d.m_fx = 4;
  d.m_fu = 0;
  d.eps = 1e-6;
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("certify");

TEST_CASE("sensitivity flops for the lorenz study") {
  CHECK(certify::flops_sensitivities(lorenz_dims()) == 29180);
}

TEST_CASE("sensitivity flops, minimal dimensions") {
  ProblemDims d;
  d.N = 1;
  d.n_x = 1;
  d.n_u = 1;
  d.N_s = 1;
  d.eps = 1e-6;
  // 1 + 1 + (8 + 8 + 10 + 10 + 16) + 1 + 1 + 1
  CHECK(certify::flops_sensitivities(d) == 57);
}

TEST_CASE("sensitivity flops are linear in N") {
  ProblemDims d = lorenz_dims();
  const auto base = certify::flops_sensitivities(d);
  d.N = 40;
  CHECK(certify::flops_sensitivities(d) == 2 * base);
}

TEST_CASE("riccati flops for the lorenz study") {
  CHECK(certify::flops_riccati(lorenz_dims()) == 7920);
}

TEST_CASE("riccati flops round the exact thirds") {
  ProblemDims d;
  d.N = 1;
  d.n_x = 1;
  d.n_u = 1;
  d.N_s = 1;
  d.eps = 1e-6;
  // 7/3 + 4 + 2 + 1/3 + 18 = 26.666..., nearest integer 27
  CHECK(certify::flops_riccati(d) == 27);
}

TEST_CASE("condensing formulas, lorenz dims") {
  const ProblemDims d = lorenz_dims();
  CHECK(certify::flops_scale_dynamics(d) == 600);
  CHECK(certify::flops_build_S(d) == 10260);
  CHECK(certify::flops_build_H(d) == 443520);
  CHECK(certify::flops_build_g1(d) == 462);
  CHECK(certify::flops_build_g2(d) == 363);
  CHECK(certify::flops_build_h(d) == 5583);
}

TEST_CASE("certificate reproduces the published study") {
  const auto cert = certify::certify(lorenz_dims(), 1e9);
  CHECK(cert.iterations == 252);
  CHECK(cert.prep_flops == 40515);
  CHECK(cert.feedback_flops == 2233710);
  CHECK(cert.estimated_time_s == doctest::Approx(0.00227).epsilon(0.01));
  CHECK(cert.estimated_time_s <= 0.0025);

  // Three significant figures match the reported totals.
  const auto round3 = [](double v) {
    const double mag = std::pow(10.0, std::floor(std::log10(v)) - 2.0);
    return std::round(v / mag) * mag;
  };
  CHECK(round3(static_cast<double>(cert.prep_flops)) == doctest::Approx(4.05e4));
  CHECK(round3(static_cast<double>(cert.feedback_flops)) == doctest::Approx(2.23e6));
}

TEST_CASE("breakdowns sum to the totals exactly") {
  const auto cert = certify::certify(lorenz_dims(), 1e9);
  std::int64_t prep = 0, fb = 0;
  for (const auto v : cert.prep_steps) prep += v;
  for (const auto v : cert.feedback_steps) fb += v;
  CHECK(prep == cert.prep_flops);
  CHECK(fb == cert.feedback_flops);
}

TEST_CASE("degenerate tolerance clamps to one iteration") {
  ProblemDims d = lorenz_dims();
  d.eps = 2.0 * d.n() + 10.0;
  const auto cert = certify::certify(d, 1e9);
  CHECK(cert.iterations == 1);
  // step 4 is exactly one iteration's cost
  const std::int64_t per_iteration =
      1 + 15LL * d.N * d.n_u + 5LL * d.n_x + certify::flops_riccati(d);
  CHECK(cert.feedback_steps[3] == per_iteration);
}

TEST_CASE("flop counts are monotone in every dimension") {
  const ProblemDims base = lorenz_dims();
  const auto total = [](const ProblemDims& d) {
    const auto c = certify::certify(d, 1.0);
    return c.prep_flops + c.feedback_flops;
  };
  const auto ref = total(base);
  for (int knob = 0; knob < 7; ++knob) {
    ProblemDims d = base;
    switch (knob) {
      case 0: d.N += 3; break;
      case 1: d.n_x += 2; break;
      case 2: d.n_u += 2; break;
      case 3: d.N_s += 1; break;
      case 4: d.m_f += 5; break;
      case 5: d.m_fx += 5; break;
      case 6: d.m_fu += 5; break;
    }
    CHECK(total(d) >= ref);
  }
  // iteration count is nonincreasing in eps
  CHECK(iteration_count(60, 1e-8) >= iteration_count(60, 1e-6));
  CHECK(iteration_count(60, 1e-6) >= iteration_count(60, 1e-4));
}

TEST_CASE("invalid dimensions are rejected") {
  ProblemDims d = lorenz_dims();
  d.N = 0;
  CHECK_THROWS_AS(certify::flops_sensitivities(d), std::invalid_argument);
  d = lorenz_dims();
  d.eps = 0.0;
  CHECK_THROWS_AS(certify::certify(d, 1e9), std::invalid_argument);
  d = lorenz_dims();
  CHECK_THROWS_AS(certify::certify(d, 0.0), std::invalid_argument);
}

TEST_SUITE_END();
