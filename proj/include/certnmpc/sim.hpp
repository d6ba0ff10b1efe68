#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "certnmpc/config.hpp"
#include "certnmpc/rti.hpp"

namespace certnmpc {

/// One closed-loop sampling step: the measured state, the applied input and
/// the solver/certificate diagnostics, plus measured wall times bracketing
/// exactly the prepare and feedback calls.
struct SimStep {
  double t = 0.0;
  VectorXd x;  // plant state at this step (the state handed to feedback)
  VectorXd u;  // applied input u_{t,0}
  int iters = 0;
  double gap = 0.0;
  std::int64_t prep_flops = 0;
  std::int64_t fb_flops = 0;
  double prep_wall_s = 0.0;
  double fb_wall_s = 0.0;
};

struct SimTrace {
  std::vector<SimStep> steps;
  int n_x = 0;
  int n_u = 0;
};

/// Run the controller (or nothing, in open-loop mode) against the simulated
/// plant. The plant uses the same RK4/N_s integrator as the controller's
/// internal model, so the study is nominal (no plant-model mismatch).
SimTrace run_closed_loop(const SimConfig& config, BackendKind backend = BackendKind::kRiccati,
                         bool open_loop = false);

/// Fixed CSV contract:
/// t,x1..xn_x,u1..un_u,iters,gap,prep_flops,fb_flops,prep_wall_s,fb_wall_s
/// All numeric trajectory content is a deterministic function of the
/// config; the two wall-time columns are measurements.
void write_csv(const SimTrace& trace, std::ostream& out);
std::string csv_header(int n_x, int n_u);

/// JSON run summary printed by the CLI: final state, certificate, measured
/// wall-time aggregates and the certified-vs-measured ratio.
std::string summary_json(const SimTrace& trace, const SimConfig& config, BackendKind backend,
                         bool open_loop);

}  // namespace certnmpc
