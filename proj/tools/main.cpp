#include <CLI11.hpp>
#include <Eigen/Cholesky>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "certnmpc/config.hpp"
#include "certnmpc/ipm.hpp"
#include "certnmpc/log.hpp"
#include "certnmpc/sim.hpp"

namespace {

using certnmpc::BackendKind;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

int run_simulate(const std::string& config_path, const std::string& out_path, bool open_loop,
                 const std::string& backend_name) {
  const certnmpc::SimConfig cfg = certnmpc::load_config(config_path);
  const BackendKind backend =
      backend_name == "dense" ? BackendKind::kDense : BackendKind::kRiccati;

  const certnmpc::SimTrace trace = certnmpc::run_closed_loop(cfg, backend, open_loop);

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open output file '" << out_path << "'\n";
    return kExitRuntimeError;
  }
  certnmpc::write_csv(trace, out);
  std::cout << certnmpc::summary_json(trace, cfg, backend, open_loop) << "\n";
  return kExitOk;
}

int run_certify(const std::string& config_path, double flops_per_sec_override) {
  const certnmpc::SimConfig cfg = certnmpc::load_config(config_path);
  const double rate = flops_per_sec_override > 0.0 ? flops_per_sec_override : cfg.flops_per_sec;
  const auto cert = certnmpc::certify::certify(cfg.dims(), rate);

  json out;
  out["n"] = cfg.dims().n();
  out["iterations"] = cert.iterations;
  out["prep_flops"] = cert.prep_flops;
  out["feedback_flops"] = cert.feedback_flops;
  out["prep_steps"] = cert.prep_steps;
  out["feedback_steps"] = cert.feedback_steps;
  out["flops_per_sec"] = cert.flops_per_sec;
  out["estimated_time_s"] = cert.estimated_time_s;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_solve_qp(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "cannot open input file '" << in_path << "'\n";
    return kExitConfigError;
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw certnmpc::ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.contains("H") || !doc.contains("h")) {
    throw certnmpc::ConfigError("H", "instance needs dense H and h");
  }
  const auto h_arr = doc["h"];
  const int n = static_cast<int>(h_arr.size());
  certnmpc::VectorXd h(n);
  for (int i = 0; i < n; ++i) h[i] = h_arr[i].get<double>();
  certnmpc::MatrixXd H(n, n);
  if (static_cast<int>(doc["H"].size()) != n) throw certnmpc::ConfigError("H", "H/h size mismatch");
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(doc["H"][r].size()) != n) throw certnmpc::ConfigError("H", "H must be square");
    for (int c = 0; c < n; ++c) H(r, c) = doc["H"][r][c].get<double>();
  }
  const double eps = doc.value("eps", 1e-6);
  if (!(eps > 0.0)) throw certnmpc::ConfigError("eps", "must be > 0");
  if (Eigen::LLT<certnmpc::MatrixXd>(0.5 * (H + H.transpose())).info() != Eigen::Success) {
    throw certnmpc::ConfigError("H", "must be symmetric positive definite");
  }

  certnmpc::DenseCholeskyBackend backend(H);
  const certnmpc::BoxQpResult res = certnmpc::solve_box_qp(h, eps, backend);

  json out;
  out["z"] = std::vector<double>(res.z.data(), res.z.data() + res.z.size());
  out["iterations"] = res.iterations;
  out["gap"] = res.gap;
  out["h_inf"] = res.h_inf;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Execution-time-certified RTI NMPC: closed-loop simulator, flop certifier, Box-QP solver"};
  app.require_subcommand(1);

  std::string config_path, out_path = "trace.csv", backend_name = "riccati", qp_path;
  bool open_loop = false;
  double flops_per_sec = 0.0;

  CLI::App* sim = app.add_subcommand("simulate", "run a closed-loop simulation and write the CSV trace");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--out", out_path, "output CSV path");
  sim->add_flag("--open-loop", open_loop, "apply zero input instead of the controller");
  sim->add_option("--backend", backend_name, "Newton backend: riccati|dense")
      ->check(CLI::IsMember({"riccati", "dense"}));

  CLI::App* cert = app.add_subcommand("certify", "print the execution-time certificate as JSON");
  cert->add_option("--config", config_path, "JSON config file")->required();
  cert->add_option("--flops-per-sec", flops_per_sec, "override the configured processing rate");

  CLI::App* qp = app.add_subcommand("solve-qp", "solve a standalone unit-box QP instance file");
  qp->add_option("--in", qp_path, "JSON file with dense H, h and eps")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config_path, out_path, open_loop, backend_name);
    if (cert->parsed()) return run_certify(config_path, flops_per_sec);
    if (qp->parsed()) return run_solve_qp(qp_path);
  } catch (const certnmpc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const certnmpc::Error& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
