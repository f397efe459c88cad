#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <tuple>
#include <utility>

#include "g2flow/forms.hpp"

namespace g2flow {

/// A positive 3-form with its induced metric, volume form and dual 4-form.
struct G2Data {
  Form phi;
  Metric g;
  Form dV;
  Form psi;
};

/// Metric, orientation and psi = *phi induced by a positive 3-form through
/// B(u,v) = (1/6) (u . phi) ^ (v . phi) ^ phi, normalized by det(B)^{-1/9}
/// so that the model form maps to the Euclidean metric.
inline G2Data metric_from_phi(const Form& phi) {
  if (phi.dim() != 7 || phi.degree() != 3)
    throw DomainError("metric_from_phi: expected a 3-form on R^7");
  Eigen::MatrixXd B(7, 7);
  std::vector<Form> iphi;
  iphi.reserve(7);
  for (int i = 0; i < 7; ++i)
    iphi.push_back(contract(Eigen::VectorXd::Unit(7, i), phi));
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      const double c = wedge(wedge(iphi[i], iphi[j]), phi)[0] / 6.0;
      B(i, j) = c;
      B(j, i) = c;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw PositivityError("metric_from_phi: 3-form is not positive (B_phi not positive definite)");
  const double detB = B.determinant();
  const double s = std::pow(detB, -1.0 / 9.0);
  Metric g(s * B);
  Form dV = std::pow(detB, 1.0 / 9.0) * euclidean_volume(7);
  Form psi = hodge(phi, g, dV);
  return G2Data{phi, std::move(g), std::move(dV), std::move(psi)};
}

/// Splits a 2-form into its Omega^2_7 and Omega^2_14 components, the
/// eigenspaces of beta -> *(phi ^ beta) with eigenvalues 2 and -1.
inline std::pair<Form, Form> project_g2_2form(const Form& beta, const G2Data& gd) {
  if (beta.dim() != 7 || beta.degree() != 2)
    throw DomainError("project_g2_2form: expected a 2-form on R^7");
  const Form L = hodge(wedge(gd.phi, beta), gd.g, gd.dV);
  Form beta7 = (1.0 / 3.0) * (L + beta);
  Form beta14 = beta - beta7;
  return {std::move(beta7), std::move(beta14)};
}

/// SU(3)-structure data on R^6: the defining pair (omega, Omega_+), the
/// derived Omega_-, almost complex structure J and metric g = omega(., J.).
struct SU3Data {
  Form omega;
  Form omega_plus;
  Form omega_minus;
  Eigen::MatrixXd J;
  Metric g;
  Form vol;  // omega^3 / 6, also the orientation used for *_6
};

/// Hitchin endomorphism of a stable 3-form, normalized so J^2 = -Id.
/// K is defined by K(v) . (omega^3/6) = -(iota_v Omega_+) ^ Omega_+; the sign
/// convention makes the model pair give J e_1 = e_2. Projectively invariant
/// in Omega_+.
inline Eigen::MatrixXd hitchin_j(const Form& omega, const Form& omega_plus) {
  if (omega.dim() != 6 || omega.degree() != 2 || omega_plus.dim() != 6 || omega_plus.degree() != 3)
    throw DomainError("hitchin_j: expected (2-form, 3-form) on R^6");
  const Form vol = (1.0 / 6.0) * wedge(wedge(omega, omega), omega);
  const double w = vol[0];
  if (std::abs(w) < 1e-14) throw StabilityError("hitchin_j: omega is degenerate");
  Eigen::MatrixXd K(6, 6);
  const auto& t5 = detail::degree_table(6, 5);
  for (int i = 0; i < 6; ++i) {
    const Form mu = wedge(contract(Eigen::VectorXd::Unit(6, i), omega_plus), omega_plus);
    // mu = iota_{K(e_i)} vol  with  iota_{e_j} e^{1..6} = (-1)^{j-1} e^{..^j..}
    for (int j = 0; j < 6; ++j) {
      const int mask = 0x3f & ~(1 << j);
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      K(j, i) = -sign * mu[t5.rank[mask]] / w;
    }
  }
  const Eigen::MatrixXd K2 = K * K;
  const double c = K2.trace() / 6.0;
  const double resid = (K2 - c * Eigen::MatrixXd::Identity(6, 6)).norm();
  if (resid > 1e-8 * std::max(1.0, std::abs(c)) || c >= -1e-14)
    throw StabilityError("hitchin_j: K^2 is not a negative multiple of the identity");
  return K / std::sqrt(-c);
}

/// Builds the full SU(3) data from a compatible pair (omega, Omega_+).
/// Omega_- is the J-transform of Omega_+ acting on each index and
/// g = omega(., J.). Throws CompatibilityError when g fails to be positive
/// definite or the SU(3) normalizations fail.
inline SU3Data j_from_omega_plus(const Form& omega, const Form& omega_plus) {
  Eigen::MatrixXd J = hitchin_j(omega, omega_plus);
  const Eigen::MatrixXd omega_mat = two_form_matrix(omega);
  Eigen::MatrixXd gmat = omega_mat * J;
  const double scale = std::max(1.0, gmat.norm());
  if ((gmat - gmat.transpose()).norm() > 1e-8 * scale)
    throw CompatibilityError("j_from_omega_plus: omega(., J.) is not symmetric");
  gmat = 0.5 * (gmat + gmat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gmat);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw CompatibilityError("j_from_omega_plus: induced metric is not positive definite");
  Metric g(gmat);
  Form omega_minus = pullback(omega_plus, J);
  Form vol = (1.0 / 6.0) * wedge(wedge(omega, omega), omega);
  // Section normalizations: omega ^ Omega_+ = 0 and omega^3/6 = Omega_+^Omega_-/4.
  const double s1 = wedge(omega, omega_plus).norm_inf();
  const Form voldiff = vol - 0.25 * wedge(omega_plus, omega_minus);
  if (s1 > 1e-8 * std::max(1.0, omega_plus.norm_inf()) ||
      voldiff.norm_inf() > 1e-8 * std::max(1.0, vol.norm_inf()))
    throw CompatibilityError("j_from_omega_plus: SU(3) normalizations violated");
  return SU3Data{omega, omega_plus, std::move(omega_minus), std::move(J), std::move(g), std::move(vol)};
}

inline SU3Data standard_su3() { return j_from_omega_plus(standard_omega(), standard_omega_plus()); }

/// SU(3) data whose metric equals a prescribed SPD matrix: the standard
/// triple pulled back by the symmetric square root of g.
inline SU3Data su3_from_metric(const Metric& g6) {
  if (g6.dim() != 6) throw DomainError("su3_from_metric: expected a 6x6 metric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g6.mat());
  const Eigen::MatrixXd A =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return j_from_omega_plus(pullback(standard_omega(), A), pullback(standard_omega_plus(), A));
}

/// Decomposes a 2-form as alpha = a*omega + alpha6 + alpha8, using the
/// eigenspaces of alpha -> *_6(alpha ^ omega) (+1 on Lambda^2_6, -1 on
/// Lambda^2_8).
inline std::tuple<double, Form, Form> project_su3_2form(const Form& alpha, const SU3Data& su3) {
  if (alpha.dim() != 6 || alpha.degree() != 2)
    throw DomainError("project_su3_2form: expected a 2-form on R^6");
  const double a = inner(alpha, su3.omega, su3.g) / inner(su3.omega, su3.omega, su3.g);
  const Form rest = alpha - a * su3.omega;
  const Form M = hodge(wedge(rest, su3.omega), su3.g, su3.vol);
  Form alpha6 = 0.5 * (rest + M);
  Form alpha8 = rest - alpha6;
  return {a, std::move(alpha6), std::move(alpha8)};
}

/// Projection of a 3-form onto Lambda^3_12 = {gamma : gamma^omega = 0,
/// gamma^Omega_+- = 0}: subtract the <Omega_+>, <Omega_-> and
/// Lambda^3_6 = {alpha ^ omega} pieces.
inline Form project_su3_3form_12(const Form& gamma, const SU3Data& su3) {
  if (gamma.dim() != 6 || gamma.degree() != 3)
    throw DomainError("project_su3_3form_12: expected a 3-form on R^6");
  Form rest = gamma;
  rest -= (inner(gamma, su3.omega_plus, su3.g) / inner(su3.omega_plus, su3.omega_plus, su3.g)) *
          su3.omega_plus;
  rest -= (inner(rest, su3.omega_minus, su3.g) / inner(su3.omega_minus, su3.omega_minus, su3.g)) *
          su3.omega_minus;
  // Lambda^3_6 basis: e^i ^ omega.
  std::vector<Form> basis6;
  basis6.reserve(6);
  for (int i = 1; i <= 6; ++i) basis6.push_back(wedge(Form::basis(6, {i}), su3.omega));
  Eigen::MatrixXd W(6, 6);
  Eigen::VectorXd rhs(6);
  for (int i = 0; i < 6; ++i) {
    rhs[i] = inner(rest, basis6[i], su3.g);
    for (int j = i; j < 6; ++j) {
      W(i, j) = inner(basis6[i], basis6[j], su3.g);
      W(j, i) = W(i, j);
    }
  }
  const Eigen::VectorXd c = W.ldlt().solve(rhs);
  for (int i = 0; i < 6; ++i) rest -= c[i] * basis6[i];
  return rest;
}

/// i_phi: symmetric 2-tensors -> 3-forms, (i_phi h)_{ijk} =
/// h_i^p phi_{pjk} + h_j^p phi_{ipk} + h_k^p phi_{ijp} (indices raised by g).
inline Form i_phi(const Eigen::MatrixXd& h, const G2Data& gd) {
  const Eigen::MatrixXd hr = h * gd.g.inverse();  // h_i{}^p
  Form out(7, 3);
  const auto& t3 = detail::degree_table(7, 3);
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    const auto id = detail::mask_indices(t3.masks[r]);
    const int i = id[0] + 1, j = id[1] + 1, k = id[2] + 1;
    double acc = 0.0;
    for (int p = 1; p <= 7; ++p) {
      acc += hr(i - 1, p - 1) * gd.phi.component({p, j, k});
      acc += hr(j - 1, p - 1) * gd.phi.component({i, p, k});
      acc += hr(k - 1, p - 1) * gd.phi.component({i, j, p});
    }
    out[r] = acc;
  }
  return out;
}

/// Inverts i_phi on <g> + S^2_0: the symmetric tensor with i_phi(h) = tau3.
inline Eigen::MatrixXd tau27_from_tau3(const Form& tau3, const G2Data& gd) {
  // Symmetric basis: diagonal E_aa then off-diagonal E_ab = e^a o e^b.
  std::vector<std::pair<int, int>> sym_idx;
  for (int a = 0; a < 7; ++a) sym_idx.emplace_back(a, a);
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) sym_idx.emplace_back(a, b);
  Eigen::MatrixXd M(35, 28);
  for (int col = 0; col < 28; ++col) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(7, 7);
    const auto [a, b] = sym_idx[col];
    E(a, b) = 1.0;
    E(b, a) = 1.0;
    M.col(col) = i_phi(E, gd).coeffs();
  }
  const Eigen::VectorXd x = M.colPivHouseholderQr().solve(tau3.coeffs());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(7, 7);
  for (int col = 0; col < 28; ++col) {
    const auto [a, b] = sym_idx[col];
    h(a, b) += x[col];
    if (a != b) h(b, a) += x[col];
  }
  // Remove any trace part (zero when tau3 lies in Lambda^3_27).
  const double tr = (gd.g.inverse() * h).trace();
  h -= (tr / 7.0) * gd.g.mat();
  return h;
}

/// The torsion quadruple of a G2-structure together with the full torsion
/// tensor and the derived scalars.
struct TorsionForms {
  double tau0 = 0.0;
  Form tau1{7, 1};
  Form tau2{7, 2};
  Form tau3{7, 3};
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(7, 7);
  double trT = 0.0;      // (7/4) tau0
  double normTsq = 0.0;  // (7/16) tau0^2 + 24 |tau1|^2 + (1/2)|tau2|^2 + (1/2)|tau3|^2
  double scal = 0.0;     // 12 d*tau1 + (21/8) tau0^2 + 30 |tau1|^2 - (1/2)|tau2|^2 - (1/2)|tau3|^2
  double dstar_tau1 = 0.0;
};

/// Solves d(phi) = tau0 psi + 3 tau1 ^ phi + *tau3 and
/// d(psi) = 4 tau1 ^ psi + tau2 ^ phi for the unique quadruple with
/// tau2 in Omega^2_14 and tau3 in Omega^3_27, then assembles T, tr T, |T|^2
/// and Scal. d*tau1 is derivative data and must be supplied by the caller
/// (0 for all homogeneous scenarios).
inline TorsionForms extract_torsion(const Form& dphi, const Form& dpsi, const G2Data& gd,
                                    double dstar_tau1 = 0.0) {
  if (dphi.dim() != 7 || dphi.degree() != 4) throw DomainError("extract_torsion: dphi must be a 4-form");
  if (dpsi.dim() != 7 || dpsi.degree() != 5) throw DomainError("extract_torsion: dpsi must be a 5-form");

  const Eigen::MatrixXd G2f = detail::gram_matrix(gd.g.inverse(), 7, 2);
  const Eigen::MatrixXd G3f = detail::gram_matrix(gd.g.inverse(), 7, 3);
  const double sq = std::sqrt(gd.g.det());
  const double osign = gd.dV[0] > 0 ? 1.0 : -1.0;

  // Unknowns x = [tau0 | tau1 (7) | tau2 (21) | tau3 (35)].
  constexpr int N = 1 + 7 + 21 + 35;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(35 + 21 + 21 + 8, N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());

  // Rows 0..34: dphi = tau0 psi + 3 tau1 ^ phi + *tau3.
  A.block(0, 0, 35, 1) = gd.psi.coeffs();
  for (int i = 0; i < 7; ++i)
    A.block(0, 1 + i, 35, 1) = 3.0 * wedge(Form::basis(7, {i + 1}), gd.phi).coeffs();
  for (int r = 0; r < 35; ++r) {
    Form e3(7, 3);
    e3[r] = 1.0;
    A.block(0, 8 + 21 + r, 35, 1) = detail::hodge_impl(e3, G3f, sq, osign).coeffs();
  }
  b.segment(0, 35) = dphi.coeffs();

  // Rows 35..55: dpsi = 4 tau1 ^ psi + tau2 ^ phi.
  for (int i = 0; i < 7; ++i)
    A.block(35, 1 + i, 21, 1) = 4.0 * wedge(Form::basis(7, {i + 1}), gd.psi).coeffs();
  for (int r = 0; r < 21; ++r) {
    Form e2(7, 2);
    e2[r] = 1.0;
    A.block(35, 8 + r, 21, 1) = wedge(e2, gd.phi).coeffs();
  }
  b.segment(35, 21) = dpsi.coeffs();

  // Rows 56..76: type constraint *(phi ^ tau2) + tau2 = 0.
  for (int r = 0; r < 21; ++r) {
    Form e2(7, 2);
    e2[r] = 1.0;
    const Form L = detail::hodge_impl(wedge(gd.phi, e2), detail::gram_matrix(gd.g.inverse(), 7, 5), sq, osign);
    A.block(56, 8 + r, 21, 1) = L.coeffs();
    A(56 + r, 8 + r) += 1.0;
  }

  // Rows 77..84: tau3 orthogonal to <phi> and Lambda^3_7 = {iota_v psi}.
  A.block(77, 8 + 21, 1, 35) = (G3f * gd.phi.coeffs()).transpose();
  for (int i = 0; i < 7; ++i) {
    const Form u = contract(Eigen::VectorXd::Unit(7, i), gd.psi);
    A.block(78 + i, 8 + 21, 1, 35) = (G3f * u.coeffs()).transpose();
  }

  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);

  TorsionForms tf;
  tf.tau0 = x[0];
  tf.tau1 = Form(7, 1, x.segment(1, 7));
  tf.tau2 = Form(7, 2, x.segment(8, 21));
  tf.tau3 = Form(7, 3, x.segment(29, 35));
  tf.dstar_tau1 = dstar_tau1;

  // Reassemble and verify the defining equations.
  const Form dphi_hat = tf.tau0 * gd.psi + 3.0 * wedge(tf.tau1, gd.phi) + hodge(tf.tau3, gd.g, gd.dV);
  const Form dpsi_hat = 4.0 * wedge(tf.tau1, gd.psi) + wedge(tf.tau2, gd.phi);
  const double scale = 1.0 + form_norm(dphi, gd.g) + form_norm(dpsi, gd.g);
  const double resid = form_norm(dphi - dphi_hat, gd.g) + form_norm(dpsi - dpsi_hat, gd.g);
  if (resid > 1e-9 * scale)
    throw InconsistentTorsionError(
        "extract_torsion: residual " + std::to_string(resid / scale) +
        " — (dphi,dpsi) not realizable in the stated type components");

  // Full torsion tensor. The vector part carries 2 iota_{tau1#} phi; the
  // coefficient is fixed by the trace/norm relations below, which the
  // displayed quadruple satisfies (see tests).
  const Eigen::MatrixXd tau27 = tau27_from_tau3(tf.tau3, gd);
  const Form v2 = contract(sharp(tf.tau1, gd.g), gd.phi);
  tf.T = (tf.tau0 / 4.0) * gd.g.mat() - tau27 - 2.0 * two_form_matrix(v2) -
         0.5 * two_form_matrix(tf.tau2);

  const double t1sq = inner(tf.tau1, tf.tau1, gd.g);
  const double t2sq = inner(tf.tau2, tf.tau2, gd.g);
  const double t3sq = inner(tf.tau3, tf.tau3, gd.g);
  tf.trT = 7.0 / 4.0 * tf.tau0;
  tf.normTsq = 7.0 / 16.0 * tf.tau0 * tf.tau0 + 24.0 * t1sq + 0.5 * t2sq + 0.5 * t3sq;
  tf.scal = 12.0 * dstar_tau1 + 21.0 / 8.0 * tf.tau0 * tf.tau0 + 30.0 * t1sq - 0.5 * t2sq - 0.5 * t3sq;
  return tf;
}

}  // namespace g2flow
