#include "certnmpc/config.hpp"

#include <Eigen/Cholesky>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace certnmpc {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

VectorXd parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = require_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

// Diagonal shorthand [d1..dn] or full row-major [[..],[..],..].
MatrixXd parse_matrix(const json& j, const std::string& path, int expected_dim) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array");
  MatrixXd m;
  if (j[0].is_array()) {
    const int rows = static_cast<int>(j.size());
    m.resize(rows, rows);
    for (int r = 0; r < rows; ++r) {
      const json& row = j[r];
      if (!row.is_array() || static_cast<int>(row.size()) != rows) {
        throw ConfigError(path, "matrix must be square");
      }
      for (int c = 0; c < rows; ++c) {
        m(r, c) = require_number(row[c], path + "[" + std::to_string(r) + "]");
      }
    }
  } else {
    const VectorXd d = parse_vector(j, path);
    m = d.asDiagonal();
  }
  if (m.rows() != expected_dim) {
    throw ConfigError(path, "expected dimension " + std::to_string(expected_dim) + ", got " +
                                std::to_string(m.rows()));
  }
  if (!m.isApprox(m.transpose(), 1e-12)) throw ConfigError(path, "matrix must be symmetric");
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw ConfigError(path, "matrix must be positive definite");
  return m;
}

// Constant vector or per-step sequence of vectors.
std::vector<VectorXd> parse_reference(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array");
  std::vector<VectorXd> out;
  if (j[0].is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(parse_vector(j[i], path + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(parse_vector(j, path));
  }
  for (const VectorXd& v : out) {
    if (v.size() != dim) throw ConfigError(path, "entries must have dimension " + std::to_string(dim));
  }
  return out;
}

}  // namespace

ModelDynamics SimConfig::make_model() const {
  if (model_name == "lorenz") return make_lorenz(lorenz_params);
  if (model_name == "double_integrator") return make_double_integrator();
  throw ConfigError("model.name", "unknown model '" + model_name + "'");
}

certify::ProblemDims SimConfig::dims() const {
  const ModelDynamics m = make_model();
  certify::ProblemDims d;
  d.N = horizon;
  d.n_x = m.n_x;
  d.n_u = m.n_u;
  d.N_s = N_s;
  d.m_f = m.m_f;
  d.m_fx = m.m_fx;
  d.m_fu = m.m_fu;
  d.eps = eps;
  return d;
}

ReferenceTrajectory SimConfig::reference_at(int step) const {
  ReferenceTrajectory refs;
  refs.x.resize(horizon + 1);
  refs.u.resize(horizon);
  const auto pick = [step](const std::vector<VectorXd>& seq, int k) -> const VectorXd& {
    if (seq.size() == 1) return seq.front();
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(step + k), seq.size() - 1);
    return seq[idx];
  };
  for (int k = 0; k <= horizon; ++k) refs.x[k] = pick(x_ref, k);
  for (int k = 0; k < horizon; ++k) refs.u[k] = pick(u_ref, k);
  return refs;
}

SimConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }

  SimConfig cfg;

  if (!j.contains("model") || !j["model"].contains("name") || !j["model"]["name"].is_string()) {
    throw ConfigError("model.name", "missing or not a string");
  }
  cfg.model_name = j["model"]["name"].get<std::string>();
  if (cfg.model_name == "lorenz" && j["model"].contains("params")) {
    const json& p = j["model"]["params"];
    if (p.contains("sigma")) cfg.lorenz_params.sigma = require_number(p["sigma"], "model.params.sigma");
    if (p.contains("rho")) cfg.lorenz_params.rho = require_number(p["rho"], "model.params.rho");
    if (p.contains("beta")) cfg.lorenz_params.beta = require_number(p["beta"], "model.params.beta");
  }
  const ModelDynamics model = cfg.make_model();

  const auto number = [&j](const char* key) {
    if (!j.contains(key)) throw ConfigError(key, "missing");
    return require_number(j[key], key);
  };
  cfg.dt = number("dt");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  cfg.T_p = number("T_p");
  cfg.sim_duration = number("sim_duration");
  if (!(cfg.sim_duration > 0.0)) throw ConfigError("sim_duration", "must be > 0");
  if (j.contains("N_s")) {
    const double ns = require_number(j["N_s"], "N_s");
    if (ns < 1.0 || ns != std::floor(ns)) throw ConfigError("N_s", "must be a positive integer");
    cfg.N_s = static_cast<int>(ns);
  }

  const double ratio = cfg.T_p / cfg.dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("T_p", "T_p / dt must be a positive integer (got " + std::to_string(ratio) + ")");
  }
  cfg.horizon = static_cast<int>(rounded);
  cfg.sim_steps = static_cast<int>(std::floor(cfg.sim_duration / cfg.dt + 1e-9));

  if (!j.contains("x0")) throw ConfigError("x0", "missing");
  cfg.x0 = parse_vector(j["x0"], "x0");
  if (cfg.x0.size() != model.n_x) throw ConfigError("x0", "dimension must match the model state");

  if (!j.contains("x_ref")) throw ConfigError("x_ref", "missing");
  cfg.x_ref = parse_reference(j["x_ref"], "x_ref", model.n_x);
  if (!j.contains("u_ref")) throw ConfigError("u_ref", "missing");
  cfg.u_ref = parse_reference(j["u_ref"], "u_ref", model.n_u);

  if (!j.contains("u_lo") || !j.contains("u_hi")) throw ConfigError("u_lo", "bounds missing");
  cfg.u_lo = parse_vector(j["u_lo"], "u_lo");
  cfg.u_hi = parse_vector(j["u_hi"], "u_hi");
  if (cfg.u_lo.size() != model.n_u || cfg.u_hi.size() != model.n_u) {
    throw ConfigError("u_lo", "bound dimension must match the model input");
  }
  for (Eigen::Index i = 0; i < cfg.u_lo.size(); ++i) {
    if (!(cfg.u_hi[i] > cfg.u_lo[i])) {
      throw ConfigError("u_hi", "must exceed u_lo in component " + std::to_string(i));
    }
  }

  if (!j.contains("W_x") || !j.contains("W_N") || !j.contains("W_u")) {
    throw ConfigError("W_x", "weights W_x, W_N, W_u are required");
  }
  cfg.weights.Wx = parse_matrix(j["W_x"], "W_x", model.n_x);
  cfg.weights.WN = parse_matrix(j["W_N"], "W_N", model.n_x);
  cfg.weights.Wu = parse_matrix(j["W_u"], "W_u", model.n_u);

  if (j.contains("eps")) cfg.eps = require_number(j["eps"], "eps");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps", "must be > 0");
  if (j.contains("flops_per_sec")) cfg.flops_per_sec = require_number(j["flops_per_sec"], "flops_per_sec");
  if (!(cfg.flops_per_sec > 0.0)) throw ConfigError("flops_per_sec", "must be > 0");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace certnmpc
