#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "g2flow/g2su3.hpp"

namespace g2flow {

/// Quotient data of an S^1-invariant G2-structure at a point: fiber length
/// h = |xi|^{-2}, connection form eta with eta(xi) = 1, and the horizontal
/// SU(3) triple. Horizontal 6-dimensional forms are kept as dim-7 forms
/// annihilated by iota_xi.
struct ReducedPoint {
  double h = 1.0;
  Form eta{7, 1};
  Form omega{7, 2};
  Form omega_plus{7, 3};
  Form omega_minus{7, 3};
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(7);
  Eigen::MatrixXd gH = Eigen::MatrixXd::Zero(7, 7);  // horizontal metric, gH(xi,.) = 0
};

/// Pointwise S^1 reduction:
///   omega   = iota_xi phi
///   Omega_+ = h^{-3/4} (phi - eta ^ iota_xi phi)
///   Omega_- = -h^{-1/4} iota_xi (*phi).
inline ReducedPoint reduce(const Form& phi, const Eigen::VectorXd& xi) {
  if (xi.size() != 7) throw DomainError("reduce: xi must have length 7");
  if (xi.norm() == 0.0) throw DomainError("reduce: xi must be nonzero");
  const G2Data gd = metric_from_phi(phi);

  ReducedPoint rp;
  rp.xi = xi;
  const double xi_sq = xi.dot(gd.g.mat() * xi);
  rp.h = 1.0 / xi_sq;  // h = |xi|_phi^{-2}
  rp.eta = Form(7, 1, rp.h * (gd.g.mat() * xi));
  rp.omega = contract(xi, phi);
  rp.omega_plus = std::pow(rp.h, -0.75) * (phi - wedge(rp.eta, rp.omega));
  rp.omega_minus = -std::pow(rp.h, -0.25) * contract(xi, gd.psi);
  rp.gH = std::pow(rp.h, -0.5) *
          (gd.g.mat() - (1.0 / rp.h) * (rp.eta.coeffs() * rp.eta.coeffs().transpose()));

  // Invariants: basicness of the reduced forms and the SU(3) normalizations
  // on the horizontal distribution.
  const double s = 1.0 + phi.norm_inf();
  if (contract(xi, rp.omega).norm_inf() > 1e-9 * s ||
      contract(xi, rp.omega_plus).norm_inf() > 1e-9 * s ||
      contract(xi, rp.omega_minus).norm_inf() > 1e-9 * s)
    throw DomainError("reduce: reduced forms are not horizontal");
  const Form w3 = wedge(wedge(rp.omega, rp.omega), rp.omega);
  const Form cmp = (1.0 / 6.0) * w3 - 0.25 * wedge(rp.omega_plus, rp.omega_minus);
  if (wedge(rp.omega, rp.omega_plus).norm_inf() > 1e-8 * s ||
      cmp.norm_inf() > 1e-8 * std::max(1.0, w3.norm_inf()))
    throw DomainError("reduce: horizontal SU(3) normalizations violated");
  return rp;
}

struct Reconstructed {
  Form phi;
  Form psi;
  Metric g7;
};

/// Exact inverse of reduce:
///   phi  = eta ^ omega + h^{3/4} Omega_+
///   *phi = (1/2) h omega^2 - h^{1/4} eta ^ Omega_-
///   g    = h^{-1} eta^2 + h^{1/2} gH.
inline Reconstructed reconstruct(const ReducedPoint& rp) {
  if (rp.h <= 0.0) throw DomainError("reconstruct: h must be positive");
  Form phi = wedge(rp.eta, rp.omega) + std::pow(rp.h, 0.75) * rp.omega_plus;
  Form psi = 0.5 * rp.h * wedge(rp.omega, rp.omega) -
             std::pow(rp.h, 0.25) * wedge(rp.eta, rp.omega_minus);
  Eigen::MatrixXd g7 = (1.0 / rp.h) * (rp.eta.coeffs() * rp.eta.coeffs().transpose()) +
                       std::sqrt(rp.h) * rp.gH;
  return Reconstructed{std::move(phi), std::move(psi), Metric(g7)};
}

/// Linearization of reconstruct().phi at rp:
///   phi_dot = eta_dot ^ omega + eta ^ omega_dot
///             + (3/4) h^{-1/4} h_dot Omega_+ + h^{3/4} Omega_+_dot.
inline Form variation(const ReducedPoint& rp, double hdot, const Form& etadot,
                      const Form& omegadot, const Form& omegaplusdot) {
  if (etadot.dim() != 7 || etadot.degree() != 1 || omegadot.degree() != 2 ||
      omegaplusdot.degree() != 3)
    throw DomainError("variation: shape mismatch");
  return wedge(etadot, rp.omega) + wedge(rp.eta, omegadot) +
         (0.75 * std::pow(rp.h, -0.25) * hdot) * rp.omega_plus +
         std::pow(rp.h, 0.75) * omegaplusdot;
}

/// Basis of the horizontal distribution ker(eta): columns are
/// P(e_i) = e_i - eta(e_i) xi for i != argmax |xi_i|.
inline Eigen::MatrixXd horizontal_basis(const ReducedPoint& rp) {
  int m = 0;
  rp.xi.cwiseAbs().maxCoeff(&m);
  Eigen::MatrixXd B(7, 6);
  int col = 0;
  for (int i = 0; i < 7; ++i) {
    if (i == m) continue;
    B.col(col++) = Eigen::VectorXd::Unit(7, i) - rp.eta.coeffs()[i] * rp.xi;
  }
  return B;
}

/// Restriction of a horizontal dim-7 form to 6-dimensional coefficients in
/// the horizontal_basis frame.
inline Form restrict_horizontal(const Form& a, const Eigen::MatrixXd& basis) {
  Form out(6, a.degree());
  const auto& t = detail::degree_table(6, a.degree());
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    const auto id = detail::mask_indices(t.masks[r]);
    Eigen::MatrixXd V(7, a.degree());
    for (int j = 0; j < a.degree(); ++j) V.col(j) = basis.col(id[j]);
    out[r] = evaluate(a, V);
  }
  return out;
}

/// The induced SU(3) structure in the horizontal frame (validated).
inline SU3Data reduced_su3(const ReducedPoint& rp) {
  const Eigen::MatrixXd B = horizontal_basis(rp);
  const Form omega6 = restrict_horizontal(rp.omega, B);
  const Form plus6 = restrict_horizontal(rp.omega_plus, B);
  return j_from_omega_plus(omega6, plus6);
}

/// The quotient metric in the horizontal frame.
inline Metric horizontal_metric6(const ReducedPoint& rp) {
  const Eigen::MatrixXd B = horizontal_basis(rp);
  return Metric(B.transpose() * rp.gH * B);
}

}  // namespace g2flow
