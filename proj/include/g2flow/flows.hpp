#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "g2flow/functionals.hpp"
#include "g2flow/grid.hpp"

namespace g2flow {

struct StepControl {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.25;
  double tol = 1e-8;       // local error bound from step doubling
  double h_floor = 1e-4;   // GH flows stop (blow-down) when min h reaches this
};

/// One CSV row of flow diagnostics (column order fixed by the cli contract).
struct FlowSample {
  double t = 0.0;
  double functional = 0.0;
  double norm_F = 0.0;
  double h_min = 1.0;
  double h_max = 1.0;
  double min_eig_g = 1.0;
  double trT = 0.0;
  double constraint_residual = 0.0;
};

namespace ode {

template <class Y, class Rhs>
Y rk4_step(const Rhs& f, double t, const Y& y, double dt) {
  const Y k1 = f(t, y);
  const Y k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
  const Y k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
  const Y k4 = f(t + dt, y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Classical RK4 with step-halving control: the local error is estimated by
/// comparing one full step against two half steps; steps violating the
/// validity predicate (SPD loss, h <= 0, non-finite values) are rejected.
/// on_accept may stop the run by returning false.
template <class Y, class Rhs, class Valid, class DiffNorm, class OnAccept>
void adaptive_rk4(const Rhs& rhs, const Valid& valid, const DiffNorm& diff_norm, double t_end,
                  Y y, const StepControl& ctl, OnAccept&& on_accept) {
  double t = 0.0;
  double dt = ctl.dt_init;
  while (t < t_end * (1.0 - 1e-14)) {
    dt = std::min(dt, t_end - t);
    bool ok = true;
    Y y_full = y, y_next = y;
    double err = 0.0;
    try {
      y_full = rk4_step(rhs, t, y, dt);
      y_next = rk4_step(rhs, t + 0.5 * dt, rk4_step(rhs, t, y, 0.5 * dt), 0.5 * dt);
      ok = valid(y_full) && valid(y_next);
      if (ok) err = diff_norm(y_full, y_next) / 15.0;
    } catch (const DomainError&) {
      ok = false;
    } catch (const PositivityError&) {
      ok = false;
    }
    if (!ok || err > ctl.tol) {
      dt *= 0.5;
      if (dt < ctl.dt_min)
        throw IntegrationError("adaptive_rk4: step size underflow at t = " + std::to_string(t));
      continue;
    }
    t += dt;
    y = y_next;
    if (!on_accept(t, y, dt)) return;
    if (err < ctl.tol / 64.0) dt = std::min(2.0 * dt, ctl.dt_max);
  }
}

}  // namespace ode

// ---------------------------------------------------------------------------
// W3 + W4 + W5 flow (constant fiber length).
// ---------------------------------------------------------------------------

struct W345Init {
  double lambda0 = 0.0;
  Form theta0{6, 1};
  Form nu30{6, 3};
  Form F0110{6, 2};
};

struct W345Closed {
  double lambda;
  Form theta{6, 1};
  Form nu3{6, 3};
  Form F011{6, 2};
};

/// theta(t) = e^{-10 pi t/9} theta0, lambda(t) = e^{-15 pi t/2} lambda0,
/// nu3(t) = e^{-pi t} nu3_0, F0_11(t) = e^{-pi t} F0_11,0.
inline W345Closed w345_closed_forms(double t, const W345Init& init) {
  const double pi = std::numbers::pi;
  W345Closed c{init.lambda0 * std::exp(-7.5 * pi * t), init.theta0, init.nu30, init.F0110};
  c.theta *= std::exp(-10.0 * pi / 9.0 * t);
  c.nu3 *= std::exp(-pi * t);
  c.F011 *= std::exp(-pi * t);
  return c;
}

struct W345FlowState {
  double t = 0.0;
  Metric g6;
  W345Init init;
  double volN = 1.0;
};

/// Right-hand side of the metric equation: the substituted closed forms make
/// this -2 pi [ (15/16 e^{-15 pi t} lambda0^2 + ...) g - 5/18 e^{-20 pi t/9}
/// theta0 x theta0 - 1/4 e^{-2 pi t} (nu o nu) - 1/4 e^{-2 pi t} (F o F) ].
inline Eigen::MatrixXd w345_metric_rhs(double t, const Metric& g6, const W345Init& init) {
  const W345Closed c = w345_closed_forms(t, init);
  const W345State s(g6, c.lambda, c.theta, c.nu3, c.F011, 1.0);
  return -2.0 * std::numbers::pi * w345_metric_gradient_tensor(s);
}

inline Eigen::MatrixXd w345_metric_rhs(const W345FlowState& s) {
  return w345_metric_rhs(s.t, s.g6, s.init);
}

struct W345Trajectory {
  std::vector<FlowSample> samples;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> metrics;
  double min_f_increment = 0.0;  // most negative functional increment observed
  bool spd_ok = true;
};

/// Residual of the compatibility condition (2/3) lambda theta ^ omega
/// + lambda nu3 with constant data, measured against the SU(3) structure
/// induced by the current metric. Reported, never enforced.
inline double w345_constraint_residual(const Metric& g, const W345Closed& c) {
  const SU3Data su3 = su3_from_metric(g);
  const Form lhs = wedge((2.0 / 3.0 * c.lambda) * c.theta, su3.omega) + c.lambda * c.nu3;
  return form_norm(lhs, g);
}

inline W345Trajectory integrate_w345(const W345Init& init, const Metric& g0, double volN,
                                     double t_end, const StepControl& ctl = StepControl{}) {
  if (t_end <= 0.0) throw DomainError("integrate_w345: t_end must be positive");
  W345Trajectory traj;
  auto rhs = [&](double t, const Eigen::MatrixXd& g) -> Eigen::MatrixXd {
    return w345_metric_rhs(t, Metric(g), init);
  };
  auto valid = [](const Eigen::MatrixXd& g) {
    if (!g.allFinite()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (g + g.transpose()));
    return llt.info() == Eigen::Success;
  };
  auto diff = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };

  auto record = [&](double t, const Eigen::MatrixXd& gmat) {
    const Metric g(0.5 * (gmat + gmat.transpose()));
    const W345Closed c = w345_closed_forms(t, init);
    const W345State s(g, c.lambda, c.theta, c.nu3, c.F011, volN);
    FlowSample row;
    row.t = t;
    row.functional = f_w345(s);
    row.norm_F = form_norm(c.F011, g);
    row.h_min = row.h_max = 1.0;
    row.min_eig_g = g.min_eigenvalue();
    row.trT = 1.5 * c.lambda;
    row.constraint_residual = w345_constraint_residual(g, c);
    if (!traj.samples.empty()) {
      const double inc = row.functional - traj.samples.back().functional;
      traj.min_f_increment = std::min(traj.min_f_increment, inc);
    }
    if (row.min_eig_g <= 0.0) traj.spd_ok = false;
    traj.samples.push_back(row);
    traj.times.push_back(t);
    traj.metrics.push_back(g.mat());
  };

  record(0.0, g0.mat());
  ode::adaptive_rk4(
      rhs, valid, diff, t_end, Eigen::MatrixXd(g0.mat()), ctl,
      [&](double t, const Eigen::MatrixXd& g, double) {
        record(t, g);
        return true;
      });
  return traj;
}

// ---------------------------------------------------------------------------
// Gibbons-Hawking flow, homogeneous mode.
// ---------------------------------------------------------------------------

/// Homogeneous GH state: constant base metric, fiber length and curvature
/// 2-form (eta itself is frozen since d*(h^{-1}F) = 0 for constant fields).
struct GHState {
  Metric g;
  double h = 1.0;
  Form F{6, 2};
};

/// Geometry inputs for the GH right-hand side; all zero in homogeneous flat
/// mode except the F-terms.
struct GeomTerms {
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(6, 6);
  double scal = 0.0;
  Eigen::MatrixXd hess_sqrt_h = Eigen::MatrixXd::Zero(6, 6);
  double lap_sqrt_h = 0.0;
  Form dstar_hinvF{6, 1};
};

struct GHRates {
  Eigen::MatrixXd gdot = Eigen::MatrixXd::Zero(6, 6);
  double hdot = 0.0;
  Form etadot{6, 1};
};

/// Negative L^2-gradient flow right-hand side:
///   dg/dt  = (1/2) h^{1/2} (Ric - 1/2 Scal g) - (1/2)(Hess u - (Lap u) g)
///            - (1/8) h^{-1} (j(F) - 1/2 |F|^2 g)
///   dh/dt  = -(1/4) h^{-1/2} Scal - (1/8) h^{-2} |F|^2
///   deta/dt= (1/4) d*(h^{-1} F)
/// with u = h^{1/2} and |F|^2 = F_{ik} F^{ik} the full contraction (the
/// convention pinned by the volume-trace identity of the flow).
inline GHRates gh_rhs(const GHState& s, const GeomTerms& geo) {
  if (s.h <= 0.0) throw DomainError("gh_rhs: h must be positive");
  const double u = std::sqrt(s.h);
  const Eigen::MatrixXd j = two_form_composition(s.F, s.g);
  const double F2 = (s.g.inverse() * j).trace();  // = 2 |F|^2_form
  GHRates r;
  r.gdot = 0.5 * u * (geo.ric - 0.5 * geo.scal * s.g.mat()) -
           0.5 * (geo.hess_sqrt_h - geo.lap_sqrt_h * s.g.mat()) -
           0.125 / s.h * (j - 0.5 * F2 * s.g.mat());
  r.hdot = -0.25 * geo.scal / u - 0.125 / (s.h * s.h) * F2;
  r.etadot = geo.dstar_hinvF;
  r.etadot *= 0.25;
  return r;
}

/// Pointwise residual of the volume-trace identity of the flow:
///   (1/2) tr_g(dg/dt) = -(1/2) h^{1/2} Scal + (5/4) Lap(h^{1/2})
///                        + (1/8) h^{-1} |F|^2.
inline double gh_volume_trace_residual(const GHState& s, const GeomTerms& geo, const GHRates& r) {
  const Eigen::MatrixXd j = two_form_composition(s.F, s.g);
  const double F2 = (s.g.inverse() * j).trace();
  const double lhs = 0.5 * (s.g.inverse() * r.gdot).trace();
  const double rhs = -0.5 * std::sqrt(s.h) * geo.scal + 1.25 * geo.lap_sqrt_h + 0.125 / s.h * F2;
  return std::abs(lhs - rhs);
}

struct GHTrajectory {
  std::vector<FlowSample> samples;
  bool blown_down = false;
  bool stationary = false;
  bool h_strictly_decreasing = true;
  double max_f_increment = 0.0;
  double max_volume_trace_residual = 0.0;
  double final_h = 1.0;
  Eigen::MatrixXd final_g = Eigen::MatrixXd::Identity(6, 6);
};

namespace detail_gh {

struct HomY {
  Eigen::MatrixXd g;
  double h;
  HomY operator+(const HomY& o) const { return {g + o.g, h + o.h}; }
  friend HomY operator*(double s, const HomY& y) { return {s * y.g, s * y.h}; }
};

}  // namespace detail_gh

/// Integrates the homogeneous flat GH flow. Blow-down of the fiber length to
/// the floor terminates the trajectory and is an expected outcome for F != 0
/// (rigidity: no nontrivial stationary points exist).
inline GHTrajectory integrate_gh_homogeneous(const GHState& init, double volN, double t_end,
                                             const StepControl& ctl = StepControl{},
                                             double stationary_tol = 1e-10) {
  if (t_end <= 0.0) throw DomainError("integrate_gh_homogeneous: t_end must be positive");
  GHTrajectory traj;
  const Form F = init.F;

  auto rhs = [&](double, const detail_gh::HomY& y) -> detail_gh::HomY {
    const GHState s{Metric(0.5 * (y.g + y.g.transpose())), y.h, F};
    const GHRates r = gh_rhs(s, GeomTerms{});
    return {r.gdot, r.hdot};
  };
  auto valid = [](const detail_gh::HomY& y) {
    if (!y.g.allFinite() || !std::isfinite(y.h) || y.h <= 0.0) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (y.g + y.g.transpose()));
    return llt.info() == Eigen::Success;
  };
  auto diff = [](const detail_gh::HomY& a, const detail_gh::HomY& b) {
    return std::max((a.g - b.g).cwiseAbs().maxCoeff(), std::abs(a.h - b.h));
  };

  const double Fnorm0 = form_norm(F, init.g);
  auto record = [&](double t, const detail_gh::HomY& y) {
    const Metric g(0.5 * (y.g + y.g.transpose()));
    const GHState s{g, y.h, F};
    const GHRates r = gh_rhs(s, GeomTerms{});
    FlowSample row;
    row.t = t;
    row.functional = f_gh(g, y.h, F, 0.0, volN);
    row.norm_F = form_norm(F, g);
    row.h_min = row.h_max = y.h;
    row.min_eig_g = g.min_eigenvalue();
    row.trT = 0.0;  // closed G2-structure
    row.constraint_residual = 0.0;
    if (!traj.samples.empty()) {
      traj.max_f_increment =
          std::max(traj.max_f_increment, row.functional - traj.samples.back().functional);
      if (y.h >= traj.samples.back().h_min && Fnorm0 > 1e-12)
        traj.h_strictly_decreasing = false;
    }
    traj.max_volume_trace_residual =
        std::max(traj.max_volume_trace_residual, gh_volume_trace_residual(s, GeomTerms{}, r));
    const double rate_sup =
        std::max({r.gdot.cwiseAbs().maxCoeff(), std::abs(r.hdot), r.etadot.norm_inf()});
    if (rate_sup < stationary_tol) traj.stationary = true;
    traj.samples.push_back(row);
    traj.final_h = y.h;
    traj.final_g = g.mat();
  };

  detail_gh::HomY y0{init.g.mat(), init.h};
  record(0.0, y0);
  ode::adaptive_rk4(rhs, valid, diff, t_end, y0, ctl,
                    [&](double t, const detail_gh::HomY& y, double) {
                      record(t, y);
                      if (y.h <= ctl.h_floor) {
                        traj.blown_down = true;
                        return false;
                      }
                      return true;
                    });
  return traj;
}

// ---------------------------------------------------------------------------
// Gibbons-Hawking flow, grid mode.
// ---------------------------------------------------------------------------

/// Grid-mode state: metric, fiber length and connection potential fields.
/// The curvature is reconstituted as F = F_harm + d(alpha) at every
/// evaluation, which keeps the de Rham class of F constant by construction.
struct GHGridY {
  grid::MatField g;
  grid::ScalarField h;
  grid::FormField alpha;

  GHGridY operator+(const GHGridY& o) const {
    GHGridY out = *this;
    out.g += o.g;
    out.h += o.h;
    out.alpha += o.alpha;
    return out;
  }
  friend GHGridY operator*(double s, GHGridY y) {
    y.g *= s;
    y.h *= s;
    y.alpha *= s;
    return y;
  }
};

struct GHGridTrajectory {
  std::vector<FlowSample> samples;
  std::vector<Eigen::VectorXd> mean_F;  // spatial mean of the 15 F-components per sample
  double max_mean_drift = 0.0;
  double max_f_increment = 0.0;
  double max_volume_trace_residual = 0.0;
  double max_dF_residual = 0.0;
  bool blown_down = false;
  bool spd_ok = true;
  // rigidity data at the first state flagged stationary (sup of all rates
  // below the tolerance): any such state must have F = 0, Scal = 0 and
  // spatially constant h.
  bool stationary = false;
  double stationary_F_sup = 0.0;
  double stationary_scal_sup = 0.0;
  double stationary_h_variance = 0.0;
};

namespace detail_gh {

struct GridRhsData {
  GHGridY rates;
  grid::ScalarField functional_density;
  grid::ScalarField trace_lhs_minus_rhs;  // volume-trace identity residual
  grid::ScalarField scal;
  grid::FormField F;

  explicit GridRhsData(const grid::GridSpec& sp)
      : rates{grid::MatField(sp, grid::Mat6::Zero()), grid::ScalarField(sp, 0.0),
              grid::FormField(sp, Form(6, 1))},
        functional_density(sp, 0.0), trace_lhs_minus_rhs(sp, 0.0), scal(sp, 0.0),
        F(sp, Form(6, 2)) {}
};

inline GridRhsData gh_grid_rhs(const GHGridY& y, const Form& F_harm) {
  const grid::GridSpec& sp = y.g.spec;
  GridRhsData out(sp);
  for (double hv : y.h.v)
    if (!(hv > 0.0)) throw DomainError("gh_grid_rhs: h must stay positive");

  // F = F_harm + d alpha.
  out.F = grid::exterior_d(y.alpha);
  for (auto& f : out.F.v) f += F_harm;

  const grid::CurvatureFields cur = grid::curvature(y.g);
  const grid::ScalarField u = y.h.map([](double x) { return std::sqrt(x); });
  auto [hess, lap] = grid::hessian_laplacian(u, y.g, cur.gamma);

  grid::FormField hinvF = out.F;
  for (std::size_t p = 0; p < hinvF.v.size(); ++p) hinvF.v[p] *= 1.0 / y.h.v[p];
  const grid::FormField dstar = grid::codifferential(hinvF, y.g);

  for (std::size_t p = 0; p < y.g.v.size(); ++p) {
    const grid::Mat6& g = y.g.v[p];
    const grid::Mat6 gi = g.inverse();
    const double h = y.h.v[p];
    const Eigen::MatrixXd Fm = two_form_matrix(out.F.v[p]);
    const grid::Mat6 j = Fm * gi * Fm.transpose();
    const double F2 = (gi * j).trace();
    const double scal = cur.scal.v[p];

    grid::Mat6 gdot = 0.5 * u.v[p] * (cur.ric.v[p] - 0.5 * scal * g) -
                      0.5 * (hess.v[p] - lap.v[p] * g) - 0.125 / h * (j - 0.5 * F2 * g);
    out.rates.g.v[p] = 0.5 * (gdot + gdot.transpose());
    out.rates.h.v[p] = -0.25 * scal / u.v[p] - 0.125 / (h * h) * F2;
    out.rates.alpha.v[p] = 0.25 * dstar.v[p];

    // |F|^2 in the functional uses the form-norm convention (= F2 / 2).
    out.functional_density.v[p] = 0.5 * u.v[p] * scal - 0.125 / h * (0.5 * F2);
    out.scal.v[p] = scal;
    const double lhs = 0.5 * (gi * gdot).trace();
    const double rhs = -0.5 * u.v[p] * scal + 1.25 * lap.v[p] + 0.125 / h * F2;
    out.trace_lhs_minus_rhs.v[p] = lhs - rhs;
  }
  return out;
}

}  // namespace detail_gh

inline GHGridTrajectory integrate_gh_grid(const GHGridY& init, const Form& F_harm, double t_end,
                                          const StepControl& ctl = StepControl{}) {
  if (t_end <= 0.0) throw DomainError("integrate_gh_grid: t_end must be positive");
  GHGridTrajectory traj;
  const grid::GridSpec& sp = init.g.spec;

  auto rhs = [&](double, const GHGridY& y) -> GHGridY {
    return detail_gh::gh_grid_rhs(y, F_harm).rates;
  };
  auto valid = [&](const GHGridY& y) {
    for (std::size_t p = 0; p < y.g.v.size(); ++p) {
      if (!y.g.v[p].allFinite() || !std::isfinite(y.h.v[p]) || y.h.v[p] <= 0.0) return false;
      Eigen::LLT<grid::Mat6> llt(grid::Mat6(0.5 * (y.g.v[p] + y.g.v[p].transpose())));
      if (llt.info() != Eigen::Success) return false;
      if (!y.alpha.v[p].coeffs().allFinite()) return false;
    }
    return true;
  };
  auto diff = [](const GHGridY& a, const GHGridY& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.g.v.size(); ++p) {
      m = std::max(m, (a.g.v[p] - b.g.v[p]).cwiseAbs().maxCoeff());
      m = std::max(m, std::abs(a.h.v[p] - b.h.v[p]));
      m = std::max(m, (a.alpha.v[p] - b.alpha.v[p]).norm_inf());
    }
    return m;
  };

  Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(15);
  auto record = [&](double t, const GHGridY& y) {
    const detail_gh::GridRhsData data = detail_gh::gh_grid_rhs(y, F_harm);
    FlowSample row;
    row.t = t;
    row.functional = 2.0 * std::numbers::pi * grid::quadrature(data.functional_density, y.g);
    double hmin = y.h.v[0], hmax = y.h.v[0], fmax = 0.0, mineig = 1e300, ctr = 0.0;
    Eigen::VectorXd meanF = Eigen::VectorXd::Zero(15);
    const grid::FormField dF = grid::exterior_d(data.F);
    for (std::size_t p = 0; p < y.h.v.size(); ++p) {
      hmin = std::min(hmin, y.h.v[p]);
      hmax = std::max(hmax, y.h.v[p]);
      const grid::Mat6 gsym = 0.5 * (y.g.v[p] + y.g.v[p].transpose());
      Eigen::SelfAdjointEigenSolver<grid::Mat6> es(gsym);
      mineig = std::min(mineig, es.eigenvalues().minCoeff());
      fmax = std::max(fmax, std::sqrt(std::max(
                                0.0, inner(data.F.v[p], data.F.v[p], Metric(gsym)))));
      ctr = std::max(ctr, dF.v[p].norm_inf());
      meanF += data.F.v[p].coeffs();
      traj.max_volume_trace_residual =
          std::max(traj.max_volume_trace_residual, std::abs(data.trace_lhs_minus_rhs.v[p]));
    }
    meanF /= static_cast<double>(y.h.v.size());
    row.norm_F = fmax;
    row.h_min = hmin;
    row.h_max = hmax;
    row.min_eig_g = mineig;
    row.trT = 0.0;
    row.constraint_residual = ctr;
    traj.max_dF_residual = std::max(traj.max_dF_residual, ctr);

    // stationarity detection and the rigidity record
    double rate_sup = 0.0, scal_sup = 0.0, hbar = 0.0;
    for (std::size_t p = 0; p < y.h.v.size(); ++p) {
      rate_sup = std::max(rate_sup, data.rates.g.v[p].cwiseAbs().maxCoeff());
      rate_sup = std::max(rate_sup, std::abs(data.rates.h.v[p]));
      rate_sup = std::max(rate_sup, data.rates.alpha.v[p].norm_inf());
      scal_sup = std::max(scal_sup, std::abs(data.scal.v[p]));
      hbar += y.h.v[p];
    }
    hbar /= static_cast<double>(y.h.v.size());
    if (rate_sup < 1e-10 && !traj.stationary) {
      traj.stationary = true;
      traj.stationary_F_sup = fmax;
      traj.stationary_scal_sup = scal_sup;
      double var = 0.0;
      for (double hv : y.h.v) var += (hv - hbar) * (hv - hbar);
      traj.stationary_h_variance = var / static_cast<double>(y.h.v.size());
    }
    if (mineig <= 0.0) traj.spd_ok = false;
    if (traj.samples.empty()) {
      mean0 = meanF;
    } else {
      traj.max_f_increment =
          std::max(traj.max_f_increment, row.functional - traj.samples.back().functional);
      traj.max_mean_drift =
          std::max(traj.max_mean_drift, (meanF - mean0).cwiseAbs().maxCoeff());
    }
    traj.samples.push_back(row);
    traj.mean_F.push_back(meanF);
    return row;
  };

  record(0.0, init);
  ode::adaptive_rk4(rhs, valid, diff, t_end, init, ctl,
                    [&](double t, const GHGridY& y, double) {
                      const FlowSample row = record(t, y);
                      if (row.h_min <= ctl.h_floor) {
                        traj.blown_down = true;
                        return false;
                      }
                      return true;
                    });
  (void)sp;
  return traj;
}

/// Rigidity check of a trajectory: if a stationary state was flagged it must
/// be trivial in the sense of the unnormalized-flow rigidity statement.
inline bool gh_grid_rigidity_ok(const GHGridTrajectory& traj, double tol = 1e-8) {
  if (!traj.stationary) return true;
  return traj.stationary_F_sup <= tol && traj.stationary_scal_sup <= tol &&
         traj.stationary_h_variance <= tol;
}

}  // namespace g2flow
