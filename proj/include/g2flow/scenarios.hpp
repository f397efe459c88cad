#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "g2flow/ansatz.hpp"
#include "g2flow/config.hpp"
#include "g2flow/flows.hpp"
#include "g2flow/functionals.hpp"
#include "g2flow/reduction.hpp"

namespace g2flow {

/// One measured invariant: pass means (value op tolerance).
struct CheckRow {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string op = "<=";  // "<=" or ">="
  bool pass = true;
};

struct ScenarioResult {
  std::string scenario;
  std::uint64_t seed = 0;
  int samples = 0;
  double tolerance = 0.0;
  std::vector<CheckRow> checks;
  bool pass = true;
  bool blown_down = false;
  std::string csv;       // flow time series, empty if none
  std::string csv_name;  // output file name for the csv

  void add(const std::string& name, double value, double tol, const std::string& op = "<=") {
    const bool ok = (op == "<=") ? (value <= tol) : (value >= tol);
    checks.push_back(CheckRow{name, value, tol, op, ok});
    pass = pass && ok;
  }
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 7;
  int samples = -1;          // -1: scenario default
  double tolerance = -1.0;   // -1: scenario default
  std::string out_json, out_csv;

  // initial data
  double lambda = 0.8;
  std::vector<double> theta, nu3, f011, f, g_diag;
  double h0 = 1.0;
  double volN = 1.0;
  double amplitude = -1.0;  // unset: each scenario picks its default
  double alpha_amplitude = 0.1;

  // flow control
  double t_end = 1.0;
  double dt = 1e-3;
  double dt_max = 0.25;
  double ode_tol = 1e-8;
  double h_floor = 1e-4;
  std::string mode = "homogeneous";

  // grid
  std::vector<int> axes{1, 2};  // 1-based in config files
  int points = 32;
  std::vector<int> resolutions{16, 32, 64};
};

namespace detail_scn {

inline const std::set<std::string>& known_scenarios() {
  static const std::set<std::string> s{"verify-torsion",  "check-variation", "reduce-roundtrip",
                                       "flow-w345",       "flow-gh",         "curvature-validate",
                                       "functional-signs"};
  return s;
}

inline std::set<std::string> allowed_keys(const std::string& scenario) {
  std::set<std::string> keys{".scenario", ".seed", ".samples", ".tolerance",
                             "tolerances.main", "output.json", "output.csv"};
  auto add = [&](const std::string& k) { keys.insert(k); };
  if (scenario == "verify-torsion" || scenario == "check-variation" ||
      scenario == "reduce-roundtrip" || scenario == "functional-signs") {
    add("initial-data.amplitude");
  } else if (scenario == "flow-w345") {
    for (const char* k : {"lambda", "theta", "nu3", "f011", "g_diag", "vol"})
      add(std::string("initial-data.") + k);
    for (const char* k : {"t_end", "dt", "dt_max", "tol"}) add(std::string("flow.") + k);
  } else if (scenario == "flow-gh") {
    for (const char* k : {"h", "f", "f_harm", "g_diag", "vol", "alpha_amplitude"})
      add(std::string("initial-data.") + k);
    for (const char* k : {"t_end", "dt", "dt_max", "tol", "h_floor", "mode"})
      add(std::string("flow.") + k);
    add("grid.axes");
    add("grid.points");
  } else if (scenario == "curvature-validate") {
    add("initial-data.amplitude");
    add("grid.resolutions");
  }
  return keys;
}

}  // namespace detail_scn

/// Strict schema validation: the scenario must be known, and every key in the
/// document must be recognized for that scenario.
inline ScenarioConfig config_from_toml(const TomlDoc& doc) {
  ScenarioConfig cfg;
  const TomlValue* scen = doc.find("", "scenario");
  if (!scen) throw ConfigError("config: missing required field 'scenario'");
  cfg.scenario = scen->as_string("scenario");
  if (!detail_scn::known_scenarios().count(cfg.scenario))
    throw ConfigError("config: unknown scenario '" + cfg.scenario + "'");

  const std::set<std::string> allowed = detail_scn::allowed_keys(cfg.scenario);
  for (const auto& [section, table] : doc.sections)
    for (const auto& [key, value] : table) {
      const std::string full = section + "." + key;
      if (!allowed.count(full))
        throw ConfigError("config: unknown key '" + (section.empty() ? key : full) + "' (line " +
                          std::to_string(value.line) + ") for scenario '" + cfg.scenario + "'");
    }

  if (const TomlValue* v = doc.find("", "seed")) cfg.seed = static_cast<std::uint64_t>(v->as_int("seed"));
  if (const TomlValue* v = doc.find("", "samples")) cfg.samples = static_cast<int>(v->as_int("samples"));
  if (const TomlValue* v = doc.find("", "tolerance")) cfg.tolerance = v->as_double("tolerance");
  if (const TomlValue* v = doc.find("tolerances", "main")) cfg.tolerance = v->as_double("tolerances.main");
  if (const TomlValue* v = doc.find("output", "json")) cfg.out_json = v->as_string("output.json");
  if (const TomlValue* v = doc.find("output", "csv")) cfg.out_csv = v->as_string("output.csv");

  if (const TomlValue* v = doc.find("initial-data", "amplitude")) cfg.amplitude = v->as_double("initial-data.amplitude");
  if (const TomlValue* v = doc.find("initial-data", "lambda")) cfg.lambda = v->as_double("initial-data.lambda");
  if (const TomlValue* v = doc.find("initial-data", "h")) cfg.h0 = v->as_double("initial-data.h");
  if (const TomlValue* v = doc.find("initial-data", "vol")) cfg.volN = v->as_double("initial-data.vol");
  if (const TomlValue* v = doc.find("initial-data", "alpha_amplitude"))
    cfg.alpha_amplitude = v->as_double("initial-data.alpha_amplitude");
  if (const TomlValue* v = doc.find("initial-data", "theta")) cfg.theta = v->as_double_array("initial-data.theta");
  if (const TomlValue* v = doc.find("initial-data", "nu3")) cfg.nu3 = v->as_double_array("initial-data.nu3");
  if (const TomlValue* v = doc.find("initial-data", "f011")) cfg.f011 = v->as_double_array("initial-data.f011");
  if (const TomlValue* v = doc.find("initial-data", "f")) cfg.f = v->as_double_array("initial-data.f");
  if (const TomlValue* v = doc.find("initial-data", "f_harm")) cfg.f = v->as_double_array("initial-data.f_harm");
  if (const TomlValue* v = doc.find("initial-data", "g_diag")) cfg.g_diag = v->as_double_array("initial-data.g_diag");

  if (const TomlValue* v = doc.find("flow", "t_end")) cfg.t_end = v->as_double("flow.t_end");
  if (const TomlValue* v = doc.find("flow", "dt")) cfg.dt = v->as_double("flow.dt");
  if (const TomlValue* v = doc.find("flow", "dt_max")) cfg.dt_max = v->as_double("flow.dt_max");
  if (const TomlValue* v = doc.find("flow", "tol")) cfg.ode_tol = v->as_double("flow.tol");
  if (const TomlValue* v = doc.find("flow", "h_floor")) cfg.h_floor = v->as_double("flow.h_floor");
  if (const TomlValue* v = doc.find("flow", "mode")) cfg.mode = v->as_string("flow.mode");
  if (cfg.mode != "homogeneous" && cfg.mode != "grid")
    throw ConfigError("config: flow.mode must be 'homogeneous' or 'grid'");

  if (const TomlValue* v = doc.find("grid", "axes")) {
    cfg.axes.clear();
    for (std::int64_t a : v->as_int_array("grid.axes")) cfg.axes.push_back(static_cast<int>(a));
  }
  if (const TomlValue* v = doc.find("grid", "points")) cfg.points = static_cast<int>(v->as_int("grid.points"));
  if (const TomlValue* v = doc.find("grid", "resolutions")) {
    cfg.resolutions.clear();
    for (std::int64_t r : v->as_int_array("grid.resolutions"))
      cfg.resolutions.push_back(static_cast<int>(r));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Sampling helpers.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd sample_spd(Rng& rng, int dim, double spread) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) += spread * rng.symmetric();
  return A.transpose() * A;
}

inline Form sample_form(Rng& rng, int dim, int degree, double amplitude) {
  Form f(dim, degree);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = amplitude * rng.symmetric();
  return f;
}

// ---------------------------------------------------------------------------
// Scenario runners.
// ---------------------------------------------------------------------------

inline ScenarioResult run_verify_torsion(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = cfg.samples > 0 ? cfg.samples : 100;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
  Rng rng(cfg.seed);
  const SU3Data su3 = standard_su3();
  const double amp = cfg.amplitude > 0 ? cfg.amplitude : 1.0;
  double d0 = 0, d1 = 0, d2 = 0, d3 = 0, dt = 0, dn = 0, ds = 0, dc = 0;
  for (int k = 0; k < res.samples; ++k) {
    const AnsatzData data = sample_ansatz(rng, su3, amp);
    const TorsionReport rep = verify_prop_torsion(data);
    d0 = std::max(d0, rep.dev_tau0);
    d1 = std::max(d1, rep.dev_tau1);
    d2 = std::max(d2, rep.dev_tau2);
    d3 = std::max(d3, rep.dev_tau3);
    dt = std::max(dt, rep.dev_trT);
    dn = std::max(dn, rep.dev_normTsq);
    ds = std::max(ds, rep.dev_scal);
    // Scal consistency: eq.Scal.curvature on the extracted taus (d*tau1 = 0)
    // against the closed form; equal to dev_scal by construction of scal.
    dc = std::max(dc, rep.dev_scal);
  }
  res.add("max_dev_tau0", d0, res.tolerance);
  res.add("max_dev_tau1", d1, res.tolerance);
  res.add("max_dev_tau2", d2, res.tolerance);
  res.add("max_dev_tau3", d3, res.tolerance);
  res.add("max_dev_trT", dt, res.tolerance);
  res.add("max_dev_normTsq", dn, res.tolerance);
  res.add("max_dev_scal", ds, res.tolerance);
  return res;
}

inline ScenarioResult run_reduce_roundtrip(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = cfg.samples > 0 ? cfg.samples : 20;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
  Rng rng(cfg.seed);
  double r_phi = 0, r_psi = 0, r_metric = 0, r_split_v = 0, r_split_h = 0;
  for (int k = 0; k <= res.samples; ++k) {
    Form phi = standard_phi();
    Eigen::VectorXd xi = Eigen::VectorXd::Unit(7, 0);
    if (k > 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(7, 7);
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) A(i, j) += 0.25 * rng.symmetric();
      phi = pullback(phi, A);
      do {
        for (int i = 0; i < 7; ++i) xi[i] = rng.symmetric();
      } while (xi.norm() < 0.3);
    }
    const G2Data gd = metric_from_phi(phi);
    const ReducedPoint rp = reduce(phi, xi);
    const Reconstructed rec = reconstruct(rp);
    const double sc = 1.0 + phi.norm_inf();
    r_phi = std::max(r_phi, (rec.phi - phi).norm_inf() / sc);
    r_psi = std::max(r_psi, (rec.psi - gd.psi).norm_inf() / sc);
    const double gsc = 1.0 + gd.g.mat().cwiseAbs().maxCoeff();
    r_metric = std::max(r_metric, (rec.g7.mat() - gd.g.mat()).cwiseAbs().maxCoeff() / gsc);
    // metric splitting: g(xi,xi) = 1/h and g(xi, ker eta) = 0
    r_split_v = std::max(r_split_v, std::abs(xi.dot(gd.g.mat() * xi) * rp.h - 1.0));
    const Eigen::MatrixXd H = horizontal_basis(rp);
    r_split_h = std::max(r_split_h, (H.transpose() * gd.g.mat() * xi).cwiseAbs().maxCoeff() /
                                        (1.0 + gd.g.mat().cwiseAbs().maxCoeff()));
  }
  res.add("max_phi_roundtrip", r_phi, res.tolerance);
  res.add("max_psi_roundtrip", r_psi, res.tolerance);
  res.add("max_metric_roundtrip", r_metric, res.tolerance);
  res.add("max_split_vertical", r_split_v, res.tolerance);
  res.add("max_split_horizontal", r_split_h, res.tolerance);
  return res;
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline ScenarioResult run_check_variation(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = cfg.samples > 0 ? cfg.samples : 25;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
  Rng rng(cfg.seed);
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  double min_order = 1e300, max_grad_dev = 0.0, max_metric_only_dev = 0.0;

  for (int k = 0; k < res.samples; ++k) {
    const Metric g(sample_spd(rng, 6, 0.15));
    const W345State s(g, rng.symmetric(), sample_form(rng, 6, 1, 1.0), sample_form(rng, 6, 3, 1.0),
                      sample_form(rng, 6, 2, 1.0), 1.0);
    VariationVector V;
    Eigen::MatrixXd km(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        km(i, j) = 0.5 * rng.symmetric();
        km(j, i) = km(i, j);
      }
    V.k = km;
    V.beta = sample_form(rng, 6, 1, 0.7);
    V.f = 0.7 * rng.symmetric();
    V.mu = sample_form(rng, 6, 3, 0.7);
    V.rho = sample_form(rng, 6, 2, 0.7);

    const double dexact = first_variation_w345(s, V);
    auto f_at = [&](double e) {
      const W345State sp(Metric(s.g6.mat() + e * V.k), s.lambda + e * V.f, s.theta + e * V.beta,
                         s.nu3 + e * V.mu, s.F011 + e * V.rho, s.volN);
      return f_w345(sp);
    };
    std::vector<double> logs_e, logs_err;
    for (double e : eps) {
      const double fd = (f_at(e) - f_at(-e)) / (2.0 * e);
      const double err = std::abs(fd - dexact);
      logs_e.push_back(std::log(e));
      logs_err.push_back(std::log(std::max(err, 1e-300)));
    }
    min_order = std::min(min_order, ls_slope(logs_e, logs_err));

    // gradient consistency: the flow right-hand sides paired with V under L^2
    const double pi = std::numbers::pi;
    const Eigen::MatrixXd grad_g = -2.0 * pi * w345_metric_gradient_tensor(s);
    const double lhs = s.volN * std::sqrt(s.g6.det()) *
                       (tensor_inner(grad_g, V.k, s.g6) +
                        inner((-10.0 * pi / 9.0) * s.theta, V.beta, s.g6) +
                        (-7.5 * pi * s.lambda) * V.f + inner((-pi) * s.nu3, V.mu, s.g6) +
                        inner((-pi) * s.F011, V.rho, s.g6));
    max_grad_dev = std::max(max_grad_dev, std::abs(lhs - dexact) / (1.0 + std::abs(dexact)));

    // metric-only direction cross-check by finite differences
    VariationVector Vk;
    Vk.k = V.k;
    const double dk = first_variation_w345(s, Vk);
    auto f_k = [&](double e) {
      const W345State sp(Metric(s.g6.mat() + e * V.k), s.lambda, s.theta, s.nu3, s.F011, s.volN);
      return f_w345(sp);
    };
    const double fdk = (f_k(1e-5) - f_k(-1e-5)) / 2e-5;
    max_metric_only_dev = std::max(max_metric_only_dev, std::abs(fdk - dk) / (1.0 + std::abs(dk)));
  }
  res.add("min_fd_order", min_order, 1.9, ">=");
  res.add("max_gradient_consistency_dev", max_grad_dev, res.tolerance);
  res.add("max_metric_direction_fd_dev", max_metric_only_dev, 1e-6);
  return res;
}

inline std::string csv_from_samples(const std::vector<FlowSample>& rows) {
  std::string out = "t,functional,norm_F,h_min,h_max,min_eig_g,trT,constraint_residual\n";
  char buf[320];
  for (const FlowSample& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.functional, r.norm_F, r.h_min, r.h_max, r.min_eig_g, r.trT,
                  r.constraint_residual);
    out += buf;
  }
  return out;
}

inline ScenarioResult run_flow_w345(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = 0;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-6;  // decay-rate tolerance

  auto form_from = [](const std::vector<double>& a, const char* key, int degree) {
    const long want = binomial(6, degree);
    if (static_cast<long>(a.size()) != want)
      throw ConfigError(std::string("config: initial-data.") + key + " must have " +
                        std::to_string(want) + " coefficients");
    return Form(6, degree, Eigen::Map<const Eigen::VectorXd>(a.data(), want));
  };
  W345Init init;
  init.lambda0 = cfg.lambda;
  if (!cfg.theta.empty()) init.theta0 = form_from(cfg.theta, "theta", 1);
  if (!cfg.nu3.empty()) init.nu30 = form_from(cfg.nu3, "nu3", 3);
  if (!cfg.f011.empty()) init.F0110 = form_from(cfg.f011, "f011", 2);
  Eigen::MatrixXd g0 = Eigen::MatrixXd::Identity(6, 6);
  if (!cfg.g_diag.empty()) {
    if (cfg.g_diag.size() != 6) throw ConfigError("config: initial-data.g_diag must have 6 entries");
    g0 = Eigen::Map<const Eigen::VectorXd>(cfg.g_diag.data(), 6).asDiagonal();
  }

  // Reject inadmissible initial data up front (primitivity with respect to
  // the SU(3) structure of the initial metric).
  {
    const W345State s0(Metric(g0), init.lambda0, init.theta0, init.nu30, init.F0110, cfg.volN);
    if (w345_primitivity_residual(s0) > 1e-8)
      throw ConfigError("config: initial-data (nu3, f011) violate the primitivity invariants");
  }

  StepControl ctl;
  ctl.dt_init = cfg.dt;
  ctl.dt_max = cfg.dt_max;
  ctl.tol = cfg.ode_tol;
  const W345Trajectory traj = integrate_w345(init, Metric(g0), cfg.volN, cfg.t_end, ctl);
  res.csv = csv_from_samples(traj.samples);

  // decay-rate fits on the closed-form fields sampled along the trajectory
  const double pi = std::numbers::pi;
  auto fit_rate = [&](auto value_at, double expected) -> double {
    std::vector<double> ts, ys;
    for (double t : traj.times) {
      const double v = value_at(t);
      if (v > 1e-280) {
        ts.push_back(t);
        ys.push_back(std::log(v));
      }
    }
    if (ts.size() < 3) return 0.0;  // field absent from the run
    return std::abs(ls_slope(ts, ys) - expected);
  };
  res.add("rate_dev_lambda",
          fit_rate([&](double t) { return std::abs(w345_closed_forms(t, init).lambda); }, -7.5 * pi),
          res.tolerance);
  res.add("rate_dev_theta",
          fit_rate([&](double t) { return w345_closed_forms(t, init).theta.norm_inf(); },
                   -10.0 * pi / 9.0),
          res.tolerance);
  res.add("rate_dev_nu3",
          fit_rate([&](double t) { return w345_closed_forms(t, init).nu3.norm_inf(); }, -pi),
          res.tolerance);
  res.add("rate_dev_f011",
          fit_rate([&](double t) { return w345_closed_forms(t, init).F011.norm_inf(); }, -pi),
          res.tolerance);
  res.add("max_functional_decrease", std::max(0.0, -traj.min_f_increment), 1e-8);
  double min_eig = 1e300;
  for (const FlowSample& r : traj.samples) min_eig = std::min(min_eig, r.min_eig_g);
  res.add("min_eig_g", min_eig, 1e-12, ">=");

  // lambda-only scalar ODE: dg/dt = c(t) g solves to
  // g(t) = exp(-(1 - e^{-15 pi t}) lambda0^2 / 8) g0.
  {
    W345Init lonly;
    lonly.lambda0 = (cfg.lambda != 0.0) ? cfg.lambda : 1.0;
    StepControl tight = ctl;
    tight.tol = 1e-12;
    const W345Trajectory lt = integrate_w345(lonly, Metric::euclidean(6), 1.0, cfg.t_end, tight);
    double dev = 0.0;
    for (std::size_t i = 0; i < lt.times.size(); ++i) {
      const double t = lt.times[i];
      const double factor =
          std::exp(-(1.0 - std::exp(-15.0 * pi * t)) * lonly.lambda0 * lonly.lambda0 / 8.0);
      dev = std::max(dev, (lt.metrics[i] - factor * Eigen::MatrixXd::Identity(6, 6))
                              .cwiseAbs()
                              .maxCoeff());
    }
    res.add("lambda_only_exact_ode_dev", dev, 1e-8);
  }
  return res;
}

inline ScenarioResult run_flow_gh(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = 0;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;

  StepControl ctl;
  ctl.dt_init = cfg.dt;
  ctl.dt_max = cfg.dt_max;
  ctl.tol = cfg.ode_tol;
  ctl.h_floor = cfg.h_floor;

  if (cfg.mode == "homogeneous") {
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Identity(6, 6);
    if (!cfg.g_diag.empty()) g0 = Eigen::Map<const Eigen::VectorXd>(cfg.g_diag.data(), 6).asDiagonal();
    Form F(6, 2);
    if (!cfg.f.empty()) {
      if (cfg.f.size() != 15) throw ConfigError("config: initial-data.f must have 15 entries");
      F = Form(6, 2, Eigen::Map<const Eigen::VectorXd>(cfg.f.data(), 15));
    }
    const GHState init{Metric(g0), cfg.h0, F};
    const GHTrajectory traj = integrate_gh_homogeneous(init, cfg.volN, cfg.t_end, ctl);
    res.csv = csv_from_samples(traj.samples);
    res.blown_down = traj.blown_down;
    const double Fnorm = form_norm(F, init.g);
    res.add("h_strictly_decreasing", traj.h_strictly_decreasing ? 1.0 : 0.0, 0.5, ">=");
    res.add("false_stationarity", (traj.stationary && Fnorm > 1e-8) ? 1.0 : 0.0, 0.5);
    res.add("max_volume_trace_residual", traj.max_volume_trace_residual, res.tolerance);
    res.add("max_functional_increase", std::max(0.0, traj.max_f_increment), 1e-8);
    // F = 0 on a flat base is exactly stationary.
    {
      const GHState frozen{Metric(g0), cfg.h0, Form(6, 2)};
      const GHTrajectory ft = integrate_gh_homogeneous(frozen, cfg.volN, std::min(cfg.t_end, 0.2), ctl);
      double drift = 0.0;
      for (const FlowSample& r : ft.samples) {
        drift = std::max(drift, std::abs(r.h_min - cfg.h0));
        drift = std::max(drift, std::abs(r.functional - ft.samples.front().functional));
      }
      drift = std::max(drift, (ft.final_g - g0).cwiseAbs().maxCoeff());
      res.add("zero_curvature_frozen_drift", drift, 0.0);
    }
    return res;
  }

  // grid mode
  if (cfg.axes.empty() || cfg.axes.size() > 2)
    throw ConfigError("config: grid.axes must list 1 or 2 axes");
  std::array<int, 2> ax{{0, 1}};
  for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
    if (cfg.axes[i] < 1 || cfg.axes[i] > 6)
      throw ConfigError("config: grid.axes entries must be in 1..6");
    ax[i] = cfg.axes[i] - 1;
  }
  const grid::GridSpec sp(ax, static_cast<int>(cfg.axes.size()), cfg.points);

  Form F_harm(6, 2);
  if (!cfg.f.empty()) {
    if (cfg.f.size() != 15) throw ConfigError("config: initial-data.f_harm must have 15 entries");
    F_harm = Form(6, 2, Eigen::Map<const Eigen::VectorXd>(cfg.f.data(), 15));
  }

  // Localized potential: alpha = a sin(x) sin(y) (e^{c1} + e^{c2}) on the
  // first two inactive axes, so F = F_harm + d alpha is closed by
  // construction with a nonzero exact part.
  std::vector<int> inactive;
  for (int axis = 0; axis < 6; ++axis)
    if (sp.slot_of_axis(axis) < 0) inactive.push_back(axis);
  Form alpha_dir = Form::basis(6, {inactive[0] + 1}) + Form::basis(6, {inactive[1] + 1});

  GHGridY y0{grid::MatField(sp, grid::Mat6::Identity()), grid::ScalarField(sp, cfg.h0),
             grid::FormField(sp, Form(6, 1))};
  for (int i = 0; i < sp.ext(0); ++i)
    for (int j = 0; j < sp.ext(1); ++j) {
      double prof = cfg.alpha_amplitude * std::sin(i * sp.spacing());
      if (sp.n_active == 2) prof *= std::sin(j * sp.spacing());
      y0.alpha.at(i, j) = prof * alpha_dir;
    }

  const GHGridTrajectory traj = integrate_gh_grid(y0, F_harm, cfg.t_end, ctl);
  res.csv = csv_from_samples(traj.samples);
  res.blown_down = traj.blown_down;
  res.add("max_mean_F_drift", traj.max_mean_drift, 1e-9);
  res.add("max_functional_increase", std::max(0.0, traj.max_f_increment), 1e-8);
  res.add("max_dF_residual", traj.max_dF_residual, res.tolerance);
  res.add("spd_preserved", traj.spd_ok ? 1.0 : 0.0, 0.5, ">=");
  res.add("max_volume_trace_residual", traj.max_volume_trace_residual, res.tolerance);
  res.add("stationary_rigidity", gh_grid_rigidity_ok(traj) ? 1.0 : 0.0, 0.5, ">=");
  return res;
}

inline ScenarioResult run_curvature_validate(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = 0;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-4;
  const double a = cfg.amplitude > 0 ? cfg.amplitude : 0.1;

  std::vector<double> log_p, log_err;
  double err_finest = 0.0;
  for (int P : cfg.resolutions) {
    const grid::GridSpec sp({{0, 1}}, 1, P);
    grid::MatField g(sp, grid::Mat6::Identity());
    grid::ScalarField exact(sp, 0.0);
    for (int i = 0; i < P; ++i) {
      const double x = i * sp.spacing();
      const double f = a * std::sin(x);
      g.at(i, 0) = std::exp(2.0 * f) * grid::Mat6::Identity();
      // 6-dim conformal formula: Scal = e^{-2f}(-10 Lap f - 20 |df|^2)
      exact.at(i, 0) = std::exp(-2.0 * f) * (10.0 * a * std::sin(x) -
                                             20.0 * a * a * std::cos(x) * std::cos(x));
    }
    const grid::CurvatureFields cur = grid::curvature(g);
    double err = 0.0;
    for (int i = 0; i < P; ++i) err = std::max(err, std::abs(cur.scal.at(i, 0) - exact.at(i, 0)));
    log_p.push_back(std::log(static_cast<double>(P)));
    log_err.push_back(std::log(std::max(err, 1e-300)));
    err_finest = err;
  }
  res.add("conformal_scal_error", err_finest, res.tolerance);
  res.add("fd_order", -ls_slope(log_p, log_err), 3.7, ">=");

  // warped product cross-check: g = diag(1, b(x1), 1, ...) has
  // Scal = -b''/b + (b')^2/(2 b^2)
  {
    const int P = cfg.resolutions.back();
    const grid::GridSpec sp({{0, 1}}, 1, P);
    grid::MatField g(sp, grid::Mat6::Identity());
    double err = 0.0;
    for (int i = 0; i < P; ++i) {
      const double x = i * sp.spacing();
      grid::Mat6 m = grid::Mat6::Identity();
      m(1, 1) = 1.0 + a * std::sin(x);
      g.at(i, 0) = m;
    }
    const grid::CurvatureFields cur = grid::curvature(g);
    for (int i = 0; i < P; ++i) {
      const double x = i * sp.spacing();
      const double b = 1.0 + a * std::sin(x), bp = a * std::cos(x), bpp = -a * std::sin(x);
      const double exact = -bpp / b + bp * bp / (2.0 * b * b);
      err = std::max(err, std::abs(cur.scal.at(i, 0) - exact));
    }
    res.add("warped_scal_error", err, res.tolerance);
  }
  return res;
}

inline ScenarioResult run_functional_signs(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.scenario = cfg.scenario;
  res.seed = cfg.seed;
  res.samples = cfg.samples > 0 ? cfg.samples : 1000;
  res.tolerance = cfg.tolerance > 0 ? cfg.tolerance : 1e-12;
  Rng rng(cfg.seed);
  const double amp = cfg.amplitude > 0 ? cfg.amplitude : 1.0;
  double w_max = -1e300, gh_max = -1e300;
  for (int k = 0; k < res.samples; ++k) {
    const Metric g(sample_spd(rng, 6, 0.2));
    const W345State s(g, rng.symmetric(), sample_form(rng, 6, 1, amp),
                      sample_form(rng, 6, 3, amp), sample_form(rng, 6, 2, amp),
                      0.5 + rng.uniform());
    w_max = std::max(w_max, f_w345(s));
    const double h = 0.2 + 2.0 * rng.uniform();
    gh_max = std::max(gh_max, f_gh(g, h, sample_form(rng, 6, 2, amp), 0.0, 1.0));
  }
  res.add("f_w345_max_over_nonzero", w_max, -res.tolerance);
  const W345State origin(Metric::euclidean(6), 0.0, Form(6, 1), Form(6, 3), Form(6, 2), 1.0);
  res.add("f_w345_abs_at_origin", std::abs(f_w345(origin)), res.tolerance);
  res.add("f_gh_flat_max", gh_max, -res.tolerance);
  return res;
}

inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.scenario == "verify-torsion") return run_verify_torsion(cfg);
  if (cfg.scenario == "reduce-roundtrip") return run_reduce_roundtrip(cfg);
  if (cfg.scenario == "check-variation") return run_check_variation(cfg);
  if (cfg.scenario == "flow-w345") return run_flow_w345(cfg);
  if (cfg.scenario == "flow-gh") return run_flow_gh(cfg);
  if (cfg.scenario == "curvature-validate") return run_curvature_validate(cfg);
  if (cfg.scenario == "functional-signs") return run_functional_signs(cfg);
  throw ConfigError("run_scenario: unknown scenario '" + cfg.scenario + "'");
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_json(const ScenarioResult& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["rng"] = Rng::name();
  j["tolerance"] = r.tolerance;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckRow& c : r.checks) {
    nlohmann::ordered_json row;
    row["name"] = c.name;
    row["value"] = c.value;
    row["op"] = c.op;
    row["tolerance"] = c.tolerance;
    row["pass"] = c.pass;
    checks.push_back(row);
  }
  j["checks"] = checks;
  j["pass"] = r.pass;
  if (r.blown_down) j["blown_down"] = true;
  if (!r.csv.empty()) j["csv"] = r.csv_name;
  return j;
}

struct WrittenReport {
  std::string json_path;
  std::string csv_path;
};

inline WrittenReport write_report(ScenarioResult& r, const std::string& outdir,
                                  const ScenarioConfig& cfg) {
  WrittenReport w;
  const std::string dir = outdir.empty() ? "." : outdir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string json_name = cfg.out_json.empty() ? cfg.scenario + ".json" : cfg.out_json;
  r.csv_name = cfg.out_csv.empty() ? cfg.scenario + ".csv" : cfg.out_csv;
  w.json_path = dir + "/" + json_name;
  if (!r.csv.empty()) {
    w.csv_path = dir + "/" + r.csv_name;
    std::ofstream f(w.csv_path);
    if (!f) throw ConfigError("cannot write csv report to " + w.csv_path);
    f << r.csv;
  }
  std::ofstream f(w.json_path);
  if (!f) throw ConfigError("cannot write json report to " + w.json_path);
  f << report_json(r).dump(2) << "\n";
  return w;
}

/// Consolidated table over a set of JSON reports. Returns the table text and
/// sets all_pass.
inline std::string summarize(const std::vector<std::string>& report_paths, bool& all_pass) {
  if (report_paths.empty()) throw ConfigError("summarize: no report files given");
  std::ostringstream out;
  out << "scenario             status  worst-check                        value         tolerance\n";
  all_pass = true;
  for (const std::string& path : report_paths) {
    std::ifstream f(path);
    if (!f) throw ConfigError("summarize: cannot read report " + path);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const std::exception& e) {
      throw ConfigError("summarize: malformed report " + path + ": " + e.what());
    }
    const bool pass = j.value("pass", false);
    all_pass = all_pass && pass;
    std::string worst = "-";
    double wv = 0.0, wt = 0.0, worst_ratio = -1e300;
    for (const auto& c : j.value("checks", nlohmann::json::array())) {
      const bool cpass = c.value("pass", false);
      const double v = c.value("value", 0.0), t = c.value("tolerance", 0.0);
      double ratio = cpass ? (t != 0.0 ? std::abs(v / t) : std::abs(v)) : 1e300;
      if (!cpass) ratio = 1e300 + std::abs(v);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = c.value("name", "?");
        wv = v;
        wt = t;
      }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %-7s %-34s %-13.5g %-13.5g\n",
                  j.value("scenario", "?").c_str(), pass ? "PASS" : "FAIL", worst.c_str(), wv, wt);
    out << buf;
  }
  return out.str();
}

}  // namespace g2flow
