#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "g2flow/flows.hpp"
#include "g2flow/grid.hpp"
#include "g2flow/rng.hpp"

using namespace g2flow;
using grid::Field;
using grid::GridSpec;
using grid::Mat6;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec spec1(int pts) { return GridSpec({{0, 1}}, 1, pts); }
GridSpec spec2(int pts) { return GridSpec({{0, 1}}, 2, pts); }

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec({{0, 1}}, 2, 6), DomainError);
  CHECK_THROWS_AS(GridSpec({{0, 1}}, 2, 24), DomainError);  // not a power of two
  CHECK_THROWS_AS(GridSpec({{0, 0}}, 2, 16), DomainError);
  CHECK_THROWS_AS(GridSpec({{0, 7}}, 2, 16), DomainError);
  CHECK_NOTHROW(GridSpec({{2, 5}}, 2, 16));
}

TEST_CASE("first derivative of sin on 32 points") {
  const GridSpec sp = spec1(32);
  grid::ScalarField f(sp, 0.0);
  for (int i = 0; i < 32; ++i) f.at(i, 0) = std::sin(i * sp.spacing());
  const grid::ScalarField df = grid::partial(f, 0);
  double err = 0.0;
  for (int i = 0; i < 32; ++i) err = std::max(err, std::abs(df.at(i, 0) - std::cos(i * sp.spacing())));
  CHECK(err < 1e-4);  // h^4 f^(5) / 30 with h = 2 pi / 32
  // inactive axis derivative is identically zero
  CHECK(grid::partial(f, 3).at(5, 0) == 0.0);
}

TEST_CASE("constant fields have exactly zero derivative") {
  const GridSpec sp = spec2(16);
  grid::ScalarField f(sp, 3.7);
  const grid::ScalarField df = grid::partial(f, 0);
  const grid::ScalarField d2f = grid::partial2(f, 0, 0);
  for (double v : df.v) CHECK(v == 0.0);
  for (double v : d2f.v) CHECK(v == 0.0);
}

TEST_CASE("mixed second partial matches the analytic value") {
  const GridSpec sp = spec2(32);
  grid::ScalarField f(sp, 0.0);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      f.at(i, j) = std::sin(i * sp.spacing()) * std::sin(j * sp.spacing());
  const grid::ScalarField dxy = grid::partial2(f, 0, 1);
  double err = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      err = std::max(err, std::abs(dxy.at(i, j) -
                                   std::cos(i * sp.spacing()) * std::cos(j * sp.spacing())));
  CHECK(err < 2e-4);
}

TEST_CASE("finite-difference convergence order on trigonometric fields") {
  std::vector<double> logs_p, logs_err;
  for (int P : {16, 32, 64}) {
    const GridSpec sp = spec1(P);
    grid::ScalarField f(sp, 0.0);
    for (int i = 0; i < P; ++i) f.at(i, 0) = std::sin(3.0 * i * sp.spacing());
    const grid::ScalarField df = grid::partial(f, 0);
    double err = 0.0;
    for (int i = 0; i < P; ++i)
      err = std::max(err, std::abs(df.at(i, 0) - 3.0 * std::cos(3.0 * i * sp.spacing())));
    logs_p.push_back(std::log(P));
    logs_err.push_back(std::log(err));
  }
  const double n = 3;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    sx += logs_p[i];
    sy += logs_err[i];
    sxx += logs_p[i] * logs_p[i];
    sxy += logs_p[i] * logs_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope >= 3.7);
}

TEST_CASE("flat metric has vanishing Christoffels and curvature") {
  const GridSpec sp = spec2(16);
  grid::MatField g(sp, Mat6::Identity());
  const grid::CurvatureFields cur = grid::curvature(g);
  for (const auto& G : cur.gamma.v)
    for (const auto& m : G.comp) CHECK(m.norm() == 0.0);
  for (const auto& r : cur.ric.v) CHECK(r.norm() == 0.0);
  for (double s : cur.scal.v) CHECK(s == 0.0);
}

TEST_CASE("conformal metric scalar curvature matches the 6-dimensional formula") {
  const double a = 0.1;
  const int P = 64;
  const GridSpec sp = spec1(P);
  grid::MatField g(sp, Mat6::Identity());
  for (int i = 0; i < P; ++i) {
    const double f = a * std::sin(i * sp.spacing());
    g.at(i, 0) = std::exp(2.0 * f) * Mat6::Identity();
  }
  const grid::CurvatureFields cur = grid::curvature(g);
  double err = 0.0;
  for (int i = 0; i < P; ++i) {
    const double x = i * sp.spacing();
    const double f = a * std::sin(x);
    // Scal = e^{-2f} (-10 Lap f - 20 |df|^2)
    const double exact =
        std::exp(-2.0 * f) * (10.0 * a * std::sin(x) - 20.0 * a * a * std::cos(x) * std::cos(x));
    err = std::max(err, std::abs(cur.scal.at(i, 0) - exact));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("warped product metric matches the hand-derived scalar curvature") {
  const double a = 0.1;
  const int P = 64;
  const GridSpec sp = spec1(P);
  grid::MatField g(sp, Mat6::Identity());
  for (int i = 0; i < P; ++i) {
    Mat6 m = Mat6::Identity();
    m(1, 1) = 1.0 + a * std::sin(i * sp.spacing());
    g.at(i, 0) = m;
  }
  const grid::CurvatureFields cur = grid::curvature(g);
  double err = 0.0;
  for (int i = 0; i < P; ++i) {
    const double x = i * sp.spacing();
    const double b = 1.0 + a * std::sin(x), bp = a * std::cos(x), bpp = -a * std::sin(x);
    const double exact = -bpp / b + bp * bp / (2.0 * b * b);
    err = std::max(err, std::abs(cur.scal.at(i, 0) - exact));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("a metric varying only along its own axis is flat") {
  const int P = 64;
  const GridSpec sp = spec1(P);
  grid::MatField g(sp, Mat6::Identity());
  for (int i = 0; i < P; ++i) {
    Mat6 m = Mat6::Identity();
    m(0, 0) = 1.0 + 0.1 * std::sin(i * sp.spacing());
    g.at(i, 0) = m;
  }
  const grid::CurvatureFields cur = grid::curvature(g);
  double smax = 0.0;
  for (double s : cur.scal.v) smax = std::max(smax, std::abs(s));
  CHECK(smax < 1e-5);
}

TEST_CASE("Laplacian of sin against the flat metric") {
  const int P = 32;
  const GridSpec sp = spec1(P);
  grid::MatField g(sp, Mat6::Identity());
  grid::ScalarField u(sp, 0.0);
  for (int i = 0; i < P; ++i) u.at(i, 0) = std::sin(i * sp.spacing());
  const grid::CurvatureFields cur = grid::curvature(g);
  auto [hess, lap] = grid::hessian_laplacian(u, g, cur.gamma);
  double err = 0.0;
  for (int i = 0; i < P; ++i) err = std::max(err, std::abs(lap.at(i, 0) + std::sin(i * sp.spacing())));
  CHECK(err < 1e-4);  // h^4 f^(6) / 90
}

TEST_CASE("discrete d o d vanishes to roundoff and means are preserved") {
  Rng rng(61);
  const GridSpec sp = spec2(16);
  grid::FormField alpha(sp, Form(6, 1));
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      Form a(6, 1);
      const double x = i * sp.spacing(), y = j * sp.spacing();
      a[0] = std::sin(x) * std::cos(y);
      a[2] = std::cos(2 * x);
      a[4] = std::sin(y);
      alpha.at(i, j) = a;
    }
  const grid::FormField da = grid::exterior_d(alpha);
  const grid::FormField dda = grid::exterior_d(da);
  double m = 0.0;
  for (const Form& f : dda.v) m = std::max(m, f.norm_inf());
  CHECK(m < 1e-12);

  // spatial mean of every component of d(anything) vanishes
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(15);
  for (const Form& f : da.v) mean += f.coeffs();
  CHECK(mean.cwiseAbs().maxCoeff() / static_cast<double>(da.v.size()) < 1e-12);
}

TEST_CASE("codifferential is adjoint to d under the flat quadrature") {
  Rng rng(62);
  const GridSpec sp = spec2(32);
  grid::MatField g(sp, Mat6::Identity());
  grid::FormField alpha(sp, Form(6, 1));
  grid::FormField beta(sp, Form(6, 2));
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double x = i * sp.spacing(), y = j * sp.spacing();
      Form a(6, 1);
      a[1] = std::sin(x);
      a[3] = std::cos(y) * std::sin(x);
      alpha.at(i, j) = a;
      Form b(6, 2);
      b[0] = std::cos(x);
      b[4] = std::sin(2 * y);
      b[7] = std::sin(x) * std::sin(y);
      beta.at(i, j) = b;
    }
  const grid::FormField da = grid::exterior_d(alpha);
  const grid::FormField db = grid::codifferential(beta, g);
  const Metric id = Metric::euclidean(6);
  grid::ScalarField lhs(sp, 0.0), rhs(sp, 0.0);
  for (std::size_t p = 0; p < lhs.v.size(); ++p) {
    lhs.v[p] = inner(da.v[p], beta.v[p], id);
    rhs.v[p] = inner(alpha.v[p], db.v[p], id);
  }
  CHECK(std::abs(grid::quadrature(lhs, g) - grid::quadrature(rhs, g)) < 1e-6);
}

TEST_CASE("codifferential of a 2-form matches the divergence formula") {
  // independent route: (d* b)^i = -(1/sqrt g) d_j (sqrt g b^{ji}) lowered by g
  Rng rng(63);
  const GridSpec sp = spec2(32);
  grid::MatField g(sp, Mat6::Identity());
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double x = i * sp.spacing(), y = j * sp.spacing();
      Mat6 m = Mat6::Identity();
      m(2, 2) = 1.0 + 0.2 * std::sin(x);
      m(3, 3) = 1.0 + 0.2 * std::cos(y);
      m(2, 3) = m(3, 2) = 0.05 * std::sin(x + y);
      g.at(i, j) = m;
    }
  grid::FormField beta(sp, Form(6, 2));
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double x = i * sp.spacing(), y = j * sp.spacing();
      Form b(6, 2);
      b[0] = std::cos(x) * std::sin(y);
      b[9] = std::sin(x);
      beta.at(i, j) = b;
    }
  const grid::FormField ours = grid::codifferential(beta, g);

  // divergence route
  grid::Field<Eigen::Matrix<double, 6, 6>> braised(sp, Mat6::Zero());
  for (std::size_t p = 0; p < beta.v.size(); ++p) {
    const Mat6 gi = g.v[p].inverse();
    const Mat6 B = two_form_matrix(beta.v[p]);
    braised.v[p] = std::sqrt(g.v[p].determinant()) * (gi * B * gi.transpose());
  }
  std::array<grid::MatField, 2> dB{grid::partial(braised, 0), grid::partial(braised, 1)};
  double err = 0.0;
  for (std::size_t p = 0; p < beta.v.size(); ++p) {
    Eigen::VectorXd vi = Eigen::VectorXd::Zero(6);
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < 6; ++i) vi[i] -= dB[s].v[p](sp.axes[s], i);
    vi /= std::sqrt(g.v[p].determinant());
    const Eigen::VectorXd lowered = g.v[p] * vi;
    err = std::max(err, (ours.v[p].coeffs() - lowered).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-5);
}

TEST_CASE("grid GH flow: flat data with F = 0 stays frozen") {
  const GridSpec sp = spec2(16);
  GHGridY y0{grid::MatField(sp, Mat6::Identity()), grid::ScalarField(sp, 1.0),
             grid::FormField(sp, Form(6, 1))};
  const GHGridTrajectory traj = integrate_gh_grid(y0, Form(6, 2), 0.05, StepControl{});
  CHECK(traj.max_f_increment == 0.0);
  for (const FlowSample& r : traj.samples) {
    CHECK(r.h_min == 1.0);
    CHECK(r.h_max == 1.0);
    CHECK(r.functional == 0.0);
  }
  // the frozen state is flagged stationary and satisfies the rigidity
  // conditions: F = 0, Scal = 0, spatially constant h
  CHECK(traj.stationary);
  CHECK(traj.stationary_F_sup <= 1e-12);
  CHECK(traj.stationary_scal_sup <= 1e-12);
  CHECK(traj.stationary_h_variance <= 1e-12);
  CHECK(gh_grid_rigidity_ok(traj));
}

TEST_CASE("grid GH flow preserves the harmonic part and descends") {
  const GridSpec sp = spec2(16);
  GHGridY y0{grid::MatField(sp, Mat6::Identity()), grid::ScalarField(sp, 1.0),
             grid::FormField(sp, Form(6, 1))};
  const Form dir = Form::basis(6, {3}) + Form::basis(6, {5});
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      y0.alpha.at(i, j) = 0.1 * std::sin(i * sp.spacing()) * std::sin(j * sp.spacing()) * dir;
  const Form F_harm = 0.5 * Form::basis(6, {1, 2});
  StepControl ctl;
  ctl.dt_init = 2e-3;
  const GHGridTrajectory traj = integrate_gh_grid(y0, F_harm, 0.02, ctl);
  CHECK(traj.samples.size() > 3);
  CHECK(traj.max_mean_drift < 1e-9);
  CHECK(traj.max_f_increment < 1e-8);
  CHECK(traj.max_dF_residual < 1e-10);
  CHECK(traj.max_volume_trace_residual < 1e-10);
  CHECK(traj.spd_ok);
  // h is actually moving, and no stationary state is flagged
  CHECK(traj.samples.back().h_min < 1.0);
  CHECK_FALSE(traj.stationary);
}
