#include "certnmpc/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "certnmpc/log.hpp"

namespace certnmpc {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

static double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SimTrace run_closed_loop(const SimConfig& config, BackendKind backend, bool open_loop) {
  const ModelDynamics model = config.make_model();
  const IntegratorSpec spec{config.dt, config.N_s};

  SimTrace trace;
  trace.n_x = model.n_x;
  trace.n_u = model.n_u;
  trace.steps.reserve(config.sim_steps);

  ControllerSettings settings;
  settings.horizon = config.horizon;
  settings.integrator = spec;
  settings.weights = config.weights;
  settings.bounds = {config.u_lo, config.u_hi};
  settings.eps = config.eps;
  settings.backend = backend;

  RtiController controller(model, settings);
  if (!open_loop) controller.start(config.x0, config.reference_at(0));

  VectorXd x = config.x0;
  for (int i = 0; i < config.sim_steps; ++i) {
    SimStep step;
    step.t = i * config.dt;
    step.x = x;

    if (open_loop) {
      step.u = VectorXd::Zero(model.n_u);
    } else {
      controller.set_reference(config.reference_at(i));
      const auto t0 = Clock::now();
      const PreparedData& prepared = controller.prepare();
      step.prep_wall_s = seconds_since(t0);
      step.prep_flops = prepared.prep_flops;

      const auto t1 = Clock::now();
      ControlSolution sol;
      try {
        sol = controller.feedback(x);
      } catch (const Error& e) {
        throw SolverFailureError("closed loop failed at step " + std::to_string(i) + ": " + e.what(),
                                 i);
      }
      step.fb_wall_s = seconds_since(t1);
      step.u = sol.u.front();
      step.iters = sol.diagnostics.iterations;
      step.gap = sol.diagnostics.gap;
      step.fb_flops = sol.diagnostics.feedback_flops;
    }

    trace.steps.push_back(step);
    x = integrate_sample(model, x, step.u, spec);
    if (!x.allFinite()) {
      throw IntegrationDivergedError("plant state diverged after step " + std::to_string(i), i);
    }
    log_debug("step " + std::to_string(i) + " iters=" + std::to_string(step.iters));
  }
  return trace;
}

static void append_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

std::string csv_header(int n_x, int n_u) {
  std::string header = "t";
  for (int i = 1; i <= n_x; ++i) header += ",x" + std::to_string(i);
  for (int i = 1; i <= n_u; ++i) header += ",u" + std::to_string(i);
  header += ",iters,gap,prep_flops,fb_flops,prep_wall_s,fb_wall_s";
  return header;
}

void write_csv(const SimTrace& trace, std::ostream& out) {
  out << csv_header(trace.n_x, trace.n_u) << "\n";
  for (const SimStep& s : trace.steps) {
    std::string line;
    append_double(line, s.t);
    for (int i = 0; i < trace.n_x; ++i) {
      line += ',';
      append_double(line, s.x[i]);
    }
    for (int i = 0; i < trace.n_u; ++i) {
      line += ',';
      append_double(line, s.u[i]);
    }
    line += ',' + std::to_string(s.iters);
    line += ',';
    append_double(line, s.gap);
    line += ',' + std::to_string(s.prep_flops);
    line += ',' + std::to_string(s.fb_flops);
    line += ',';
    append_double(line, s.prep_wall_s);
    line += ',';
    append_double(line, s.fb_wall_s);
    out << line << "\n";
  }
}

std::string summary_json(const SimTrace& trace, const SimConfig& config, BackendKind backend,
                         bool open_loop) {
  json out;
  out["model"] = config.model_name;
  out["backend"] = backend == BackendKind::kRiccati ? "riccati" : "dense";
  out["open_loop"] = open_loop;
  out["steps"] = trace.steps.size();
  out["dt"] = config.dt;
  out["horizon"] = config.horizon;
  out["n"] = config.horizon * trace.n_u;
  out["seed"] = config.seed;

  if (!trace.steps.empty()) {
    const SimStep& last = trace.steps.back();
    out["final_state"] = std::vector<double>(last.x.data(), last.x.data() + last.x.size());
    out["iterations_per_step"] = last.iters;
  }

  const auto cert = certify::certify(config.dims(), config.flops_per_sec);
  json jcert;
  jcert["iterations"] = cert.iterations;
  jcert["prep_flops"] = cert.prep_flops;
  jcert["feedback_flops"] = cert.feedback_flops;
  jcert["estimated_time_s"] = cert.estimated_time_s;
  jcert["flops_per_sec"] = cert.flops_per_sec;
  out["certificate"] = jcert;

  if (!open_loop && !trace.steps.empty()) {
    double prep_total = 0.0, fb_total = 0.0, fb_max = 0.0;
    for (const SimStep& s : trace.steps) {
      prep_total += s.prep_wall_s;
      fb_total += s.fb_wall_s;
      fb_max = std::max(fb_max, s.fb_wall_s);
    }
    const double fb_mean = fb_total / static_cast<double>(trace.steps.size());
    json meas;
    meas["prep_wall_total_s"] = prep_total;
    meas["fb_wall_total_s"] = fb_total;
    meas["fb_wall_mean_s"] = fb_mean;
    meas["fb_wall_max_s"] = fb_max;
    out["measured"] = meas;
    // Measured feedback time expressed in certified-flop units; hardware
    // dependent, reported but never asserted.
    const double factor =
        fb_mean * config.flops_per_sec / static_cast<double>(cert.feedback_flops);
    out["certified_vs_measured_factor"] = factor;
    log_info("certified_vs_measured_factor = " + std::to_string(factor));
  }
  return out.dump(2);
}

}  // namespace certnmpc
