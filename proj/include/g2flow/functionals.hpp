#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "g2flow/g2su3.hpp"

namespace g2flow {

/// The G2-Hilbert density (1/6) Scal - (1/3) |T|^2 - (1/6) (tr T)^2 times a
/// volume, for homogeneous data.
inline double f_general(double scal, double normTsq, double trT, double vol) {
  if (vol <= 0.0) throw DomainError("f_general: volume must be positive");
  return (scal / 6.0 - normTsq / 3.0 - trT * trT / 6.0) * vol;
}

/// Reduced data of the constant fiber-length ansatz: base metric and the
/// torsion tuple (lambda, theta, nu3, F0_11). volN is the reference
/// (coordinate) volume of the base; Riemannian volumes carry the
/// sqrt(det g) factor so metric variations see the volume response.
struct W345State {
  Metric g6;
  double lambda = 0.0;
  Form theta{6, 1};
  Form nu3{6, 3};
  Form F011{6, 2};
  double volN = 1.0;

  W345State(Metric g, double lambda_, Form theta_, Form nu3_, Form f011_, double volN_)
      : g6(std::move(g)), lambda(lambda_), theta(std::move(theta_)), nu3(std::move(nu3_)),
        F011(std::move(f011_)), volN(volN_) {
    if (g6.dim() != 6) throw DomainError("W345State: base metric must be 6x6");
    if (theta.dim() != 6 || theta.degree() != 1 || nu3.degree() != 3 || F011.degree() != 2)
      throw DomainError("W345State: form shapes mismatch");
    if (volN <= 0.0) throw DomainError("W345State: volN must be positive");
  }
};

/// Residuals of the AnsatzData primitivity invariants with respect to the
/// SU(3) data induced by the metric's frame.
inline double w345_primitivity_residual(const W345State& s) {
  const SU3Data su3 = su3_from_metric(s.g6);
  double r = wedge(s.nu3, su3.omega).norm_inf();
  r = std::max(r, (s.nu3 - project_su3_3form_12(s.nu3, su3)).norm_inf());
  r = std::max(r, wedge(s.F011, wedge(su3.omega, su3.omega)).norm_inf());
  r = std::max(r, wedge(s.F011, su3.omega_plus).norm_inf());
  return r;
}

/// A = (15/8) lambda^2 + (5/18)|theta|^2 + (1/4)|nu3|^2 + (1/4)|F0_11|^2.
inline double w345_density(const W345State& s) {
  return 15.0 / 8.0 * s.lambda * s.lambda + 5.0 / 18.0 * inner(s.theta, s.theta, s.g6) +
         0.25 * inner(s.nu3, s.nu3, s.g6) + 0.25 * inner(s.F011, s.F011, s.g6);
}

/// Reduced functional F = -2 pi \int_N A dV_g. Nonpositive; zero exactly at
/// lambda = theta = nu3 = F0_11 = 0.
inline double f_w345(const W345State& s) {
  return -2.0 * std::numbers::pi * s.volN * std::sqrt(s.g6.det()) * w345_density(s);
}

/// Infinitesimal variation (k, beta, f, mu, rho) of (g, theta, lambda, nu3, F0_11).
struct VariationVector {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(6, 6);
  Form beta{6, 1};
  double f = 0.0;
  Form mu{6, 3};
  Form rho{6, 2};
};

/// j(F)_{ij} = F_{ia} F_{jb} g^{ab}. Its g-trace is the full contraction
/// F_{ik}F^{ik} = 2 |F|^2 in the module's form-norm convention.
inline Eigen::MatrixXd two_form_composition(const Form& F, const Metric& g) {
  const Eigen::MatrixXd M = two_form_matrix(F);
  return M * g.inverse() * M.transpose();
}

/// (nu o nu)_{ij} = (1/2) nu_{iab} nu_{jcd} g^{ac} g^{bd}; tr_g of this is
/// 3 |nu|^2 in the form-norm convention.
inline Eigen::MatrixXd three_form_composition(const Form& nu, const Metric& g) {
  if (nu.degree() != 3) throw DomainError("three_form_composition: expected a 3-form");
  const int n = nu.dim();
  std::vector<Eigen::MatrixXd> M(n);
  for (int i = 0; i < n; ++i)
    M[i] = two_form_matrix(contract(Eigen::VectorXd::Unit(n, i), nu));
  const Eigen::MatrixXd& gi = g.inverse();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd gi_Mi_gi = gi * M[i] * gi;
    for (int j = i; j < n; ++j) {
      out(i, j) = 0.5 * (M[j].transpose() * gi_Mi_gi).trace();
      out(j, i) = out(i, j);
    }
  }
  return out;
}

/// The symmetric tensor paired with the metric variation in the first
/// variation: Q = (A/2) g - (5/18) theta x theta - (1/4)(nu3 o nu3)
/// - (1/4)(F o F). The metric part of the gradient flow is -2 pi Q.
inline Eigen::MatrixXd w345_metric_gradient_tensor(const W345State& s) {
  const double A = w345_density(s);
  return 0.5 * A * s.g6.mat() -
         5.0 / 18.0 * (s.theta.coeffs() * s.theta.coeffs().transpose()) -
         0.25 * three_form_composition(s.nu3, s.g6) -
         0.25 * two_form_composition(s.F011, s.g6);
}

inline double tensor_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Metric& g) {
  return (g.inverse() * a * g.inverse() * b.transpose()).trace();
}

/// First variation of f_w345 (Gateaux derivative; certified against central
/// differences):
///   dF(V) = -2 pi \int [ (15/4) lambda f + (5/9)<theta,beta> + (1/2)<nu3,mu>
///                        + (1/2)<F,rho> + <Q, k> ] dV_g.
inline double first_variation_w345(const W345State& s, const VariationVector& V) {
  if (V.k.rows() != 6 || V.k.cols() != 6) throw DomainError("first_variation_w345: k must be 6x6");
  const double pairing = 15.0 / 4.0 * s.lambda * V.f + 5.0 / 9.0 * inner(s.theta, V.beta, s.g6) +
                         0.5 * inner(s.nu3, V.mu, s.g6) + 0.5 * inner(s.F011, V.rho, s.g6) +
                         tensor_inner(w345_metric_gradient_tensor(s), V.k, s.g6);
  return -2.0 * std::numbers::pi * s.volN * std::sqrt(s.g6.det()) * pairing;
}

/// Gibbons-Hawking reduced functional, homogeneous mode:
///   F = 2 pi \int ( (1/2) h^{1/2} Scal(g) - (1/8) h^{-1} |F|^2 ) dV_g,
/// with |F|^2 in the module norm convention. volN is the reference volume.
inline double f_gh(const Metric& g, double h, const Form& F, double scal_g, double volN) {
  if (h <= 0.0) throw DomainError("f_gh: h must be positive");
  if (F.dim() != 6 || F.degree() != 2) throw DomainError("f_gh: F must be a 2-form on R^6");
  const double density = 0.5 * std::sqrt(h) * scal_g - 0.125 / h * inner(F, F, g);
  return 2.0 * std::numbers::pi * volN * std::sqrt(g.det()) * density;
}

}  // namespace g2flow
