#include "certnmpc/rti.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace certnmpc {

GuessTrajectory shift(const ControlSolution& previous, const ModelDynamics& model,
                      const IntegratorSpec& spec) {
  const int N = static_cast<int>(previous.u.size());
  if (static_cast<int>(previous.x.size()) != N + 1 || N < 1) {
    throw std::invalid_argument("shift: malformed previous solution");
  }
  GuessTrajectory guess;
  guess.x.resize(N + 1);
  guess.u.resize(N);
  for (int k = 0; k < N; ++k) guess.x[k] = previous.x[k + 1];
  for (int k = 0; k + 1 < N; ++k) guess.u[k] = previous.u[k + 1];
  guess.u[N - 1] = previous.u[N - 1];  // last two guess inputs coincide
  guess.x[N] = integrate_sample(model, guess.x[N - 1], guess.u[N - 1], spec);
  return guess;
}

GuessTrajectory cold_start_guess(const ModelDynamics& model, const VectorXd& x0,
                                 const ReferenceTrajectory& refs, const InputBounds& bounds,
                                 const IntegratorSpec& spec, int horizon) {
  GuessTrajectory guess;
  guess.x.resize(horizon + 1);
  guess.u.resize(horizon);
  guess.x[0] = x0;
  for (int k = 0; k < horizon; ++k) {
    guess.u[k] = refs.u[k].cwiseMax(bounds.lo).cwiseMin(bounds.hi);
    guess.x[k + 1] = integrate_sample(model, guess.x[k], guess.u[k], spec);
  }
  return guess;
}

PreparedData prepare(const ModelDynamics& model, GuessTrajectory guess, ReferenceTrajectory refs,
                     const InputBounds& bounds, const Weights& weights,
                     const IntegratorSpec& spec) {
  const int N = static_cast<int>(guess.u.size());
  if (static_cast<int>(guess.x.size()) != N + 1) {
    throw std::invalid_argument("prepare: guess needs N+1 states and N inputs");
  }
  if (static_cast<int>(refs.x.size()) != N + 1 || static_cast<int>(refs.u.size()) != N) {
    throw std::invalid_argument("prepare: references need N+1 states and N inputs");
  }

  PreparedData prepared;
  const std::vector<StageTriple> raw = horizon_sensitivities(model, guess.x, guess.u, spec);
  prepared.condensed.scaling = build_scaling(bounds.lo, bounds.hi, guess.u);
  prepared.condensed.stages = scale_dynamics(raw, prepared.condensed.scaling);
  prepared.condensed.weights = weights;
  prepared.condensed.S = build_S(prepared.condensed.stages);
  prepared.condensed.g1 = build_g1(prepared.condensed.stages, guess.x, refs.x);

  prepared.guess = std::move(guess);
  prepared.refs = std::move(refs);
  prepared.bounds = bounds;
  prepared.integrator = spec;

  prepared.dims.N = N;
  prepared.dims.n_x = model.n_x;
  prepared.dims.n_u = model.n_u;
  prepared.dims.N_s = spec.substeps;
  prepared.dims.m_f = model.m_f;
  prepared.dims.m_fx = model.m_fx;
  prepared.dims.m_fu = model.m_fu;

  // Certified preparation-phase cost (shift + sensitivities + condense).
  {
    certify::ProblemDims d = prepared.dims;
    d.eps = 1.0;  // iteration count does not enter the preparation total
    const auto cert = certify::certify(d, 1.0);
    prepared.prep_flops = cert.prep_flops;
  }
  return prepared;
}

ControlSolution feedback(PreparedData& prepared, const VectorXd& x_hat, double eps,
                         NewtonBackend& backend) {
  const int N = prepared.condensed.horizon();
  const int n_u = prepared.condensed.n_u();
  CondensedProblem& cp = prepared.condensed;

  // Finish the gradient with the measured state.
  cp.g2 = build_g2(cp.stages, x_hat, prepared.guess.x[0]);
  const VectorXd g = cp.g1 + cp.g2;
  auto [h, h_inf] = build_h(cp.S, g, cp.weights, cp.scaling, prepared.refs.u, prepared.bounds.lo,
                            prepared.bounds.hi);
  cp.h = h;
  cp.h_inf = h_inf;

  ControlSolution sol;
  sol.diagnostics.h_inf = h_inf;

  VectorXd z;
  if (h_inf == 0.0) {
    z = VectorXd::Zero(static_cast<Eigen::Index>(N) * n_u);
  } else {
    backend.bind(cp);
    const BoxQpResult res = solve_box_qp(h, eps, backend);
    z = res.z;
    sol.diagnostics.iterations = res.iterations;
    sol.diagnostics.gap = res.gap;
    if ((z.array().abs() > 1.0 + 1e-9).any()) {
      throw InvariantViolationError("feedback: solution left the unit box");
    }
  }

  // Recover the step and apply it to the guess.
  sol.x.resize(N + 1);
  sol.u.resize(N);
  VectorXd dx = x_hat - prepared.guess.x[0];
  sol.x[0] = prepared.guess.x[0] + dx;
  for (int k = 0; k < N; ++k) {
    const auto zk = z.segment(static_cast<Eigen::Index>(k) * n_u, n_u);
    const VectorXd du = cp.scaling.D.asDiagonal() * zk + cp.scaling.d[k];
    sol.u[k] = prepared.guess.u[k] + du;
    dx = cp.stages[k].A * dx + cp.stages[k].B * zk + cp.stages[k].r;
    sol.x[k + 1] = prepared.guess.x[k + 1] + dx;
  }

  for (const VectorXd& u : sol.u) {
    if (((u - prepared.bounds.hi).array() > 1e-9).any() ||
        ((prepared.bounds.lo - u).array() > 1e-9).any()) {
      throw InvariantViolationError("feedback: input outside bounds");
    }
  }

  sol.diagnostics.prep_flops = prepared.prep_flops;
  {
    certify::ProblemDims d = prepared.dims;
    d.eps = eps;
    sol.diagnostics.feedback_flops = certify::certify(d, 1.0).feedback_flops;
  }
  return sol;
}

RtiController::RtiController(ModelDynamics model, ControllerSettings settings)
    : model_(std::move(model)), settings_(std::move(settings)) {
  if (settings_.horizon < 1) throw std::invalid_argument("RtiController: horizon must be >= 1");
  if (!settings_.integrator.valid()) {
    throw std::invalid_argument("RtiController: invalid integrator spec");
  }
}

void RtiController::start(const VectorXd& x0, ReferenceTrajectory refs) {
  refs_ = std::move(refs);
  guess_ = cold_start_guess(model_, x0, refs_, settings_.bounds, settings_.integrator,
                            settings_.horizon);
  previous_.reset();
  prepared_.reset();
  started_ = true;
}

void RtiController::set_reference(ReferenceTrajectory refs) { refs_ = std::move(refs); }

const PreparedData& RtiController::prepare() {
  if (!started_) throw std::logic_error("RtiController: prepare before start");
  if (previous_.has_value()) {
    guess_ = shift(*previous_, model_, settings_.integrator);
  }
  prepared_ = certnmpc::prepare(model_, guess_, refs_, settings_.bounds, settings_.weights,
                                settings_.integrator);
  return *prepared_;
}

ControlSolution RtiController::feedback(const VectorXd& x_hat) {
  if (!prepared_.has_value()) throw std::logic_error("RtiController: feedback before prepare");
  NewtonBackend& backend =
      settings_.backend == BackendKind::kRiccati ? static_cast<NewtonBackend&>(riccati_)
                                                 : static_cast<NewtonBackend&>(dense_);
  ControlSolution sol = certnmpc::feedback(*prepared_, x_hat, settings_.eps, backend);
  previous_ = sol;
  return sol;
}

}  // namespace certnmpc
