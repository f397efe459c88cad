#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "g2flow/functionals.hpp"
#include "g2flow/rng.hpp"

using namespace g2flow;

namespace {

constexpr double kPi = std::numbers::pi;

Form random_form(Rng& rng, int deg, double amp = 1.0) {
  Form f(6, deg);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = amp * rng.symmetric();
  return f;
}

Metric random_metric(Rng& rng, double spread = 0.15) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) += spread * rng.symmetric();
  return Metric(A.transpose() * A);
}

W345State random_state(Rng& rng) {
  return W345State(random_metric(rng), rng.symmetric(), random_form(rng, 1), random_form(rng, 3),
                   random_form(rng, 2), 1.0);
}

}  // namespace

TEST_CASE("general functional values") {
  CHECK(f_general(0.0, 0.0, 0.0, 1.0) == 0.0);
  // lambda = 1 ansatz point: Scal = -3/2, |T|^2 = 15/4, tr T = 3/2
  CHECK_THAT(f_general(-1.5, 3.75, 1.5, 1.0), Catch::Matchers::WithinAbs(-15.0 / 8.0, 1e-15));
  CHECK_THROWS_AS(f_general(0, 0, 0, 0.0), DomainError);
}

TEST_CASE("reduced functional values") {
  const Metric id = Metric::euclidean(6);
  CHECK(f_w345(W345State(id, 0.0, Form(6, 1), Form(6, 3), Form(6, 2), 1.0)) == 0.0);
  const double at_lambda1 = f_w345(W345State(id, 1.0, Form(6, 1), Form(6, 3), Form(6, 2), 1.0));
  CHECK_THAT(at_lambda1, Catch::Matchers::WithinAbs(-15.0 * kPi / 4.0, 1e-13));
  // 2 pi times the density at the lambda = 1 point agrees with f_general
  CHECK_THAT(2.0 * kPi * f_general(-1.5, 3.75, 1.5, 1.0),
             Catch::Matchers::WithinAbs(at_lambda1, 1e-13));
  const double at_theta = f_w345(W345State(id, 0.0, Form::basis(6, {1}), Form(6, 3), Form(6, 2), 1.0));
  CHECK_THAT(at_theta, Catch::Matchers::WithinAbs(-5.0 * kPi / 9.0, 1e-13));
}

TEST_CASE("composition tensors and their traces") {
  Rng rng(41);
  const Metric g = random_metric(rng);
  const Form F = random_form(rng, 2);
  const Form nu = random_form(rng, 3);
  // tr_g j(F) = full contraction = 2 |F|^2 in the form-norm convention
  CHECK_THAT((g.inverse() * two_form_composition(F, g)).trace(),
             Catch::Matchers::WithinRel(2.0 * inner(F, F, g), 1e-12));
  // tr_g (nu o nu) = 3 |nu|^2
  CHECK_THAT((g.inverse() * three_form_composition(nu, g)).trace(),
             Catch::Matchers::WithinRel(3.0 * inner(nu, nu, g), 1e-12));
}

TEST_CASE("first variation: zero direction and the pure-lambda direction") {
  Rng rng(42);
  const W345State s = random_state(rng);
  CHECK(first_variation_w345(s, VariationVector{}) == 0.0);

  const W345State sl(Metric::euclidean(6), 1.0, Form(6, 1), Form(6, 3), Form(6, 2), 1.0);
  VariationVector V;
  V.f = 0.37;
  CHECK_THAT(first_variation_w345(sl, V),
             Catch::Matchers::WithinAbs(-2.0 * kPi * 15.0 / 4.0 * 0.37, 1e-13));
}

TEST_CASE("first variation matches central differences at order 2") {
  Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    const W345State s = random_state(rng);
    VariationVector V;
    Eigen::MatrixXd k(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        k(i, j) = 0.5 * rng.symmetric();
        k(j, i) = k(i, j);
      }
    V.k = k;
    V.beta = random_form(rng, 1, 0.7);
    V.f = 0.7 * rng.symmetric();
    V.mu = random_form(rng, 3, 0.7);
    V.rho = random_form(rng, 2, 0.7);
    const double dexact = first_variation_w345(s, V);
    auto f_at = [&](double e) {
      return f_w345(W345State(Metric(s.g6.mat() + e * V.k), s.lambda + e * V.f,
                              s.theta + e * V.beta, s.nu3 + e * V.mu, s.F011 + e * V.rho, s.volN));
    };
    const double e1 = 1e-3, e2 = 1e-4;
    const double err1 = std::abs((f_at(e1) - f_at(-e1)) / (2 * e1) - dexact);
    const double err2 = std::abs((f_at(e2) - f_at(-e2)) / (2 * e2) - dexact);
    CHECK(std::log10(err1 / err2) > 1.7);  // Richardson slope ~ 2
    CHECK(err2 < 1e-6);
  }
}

TEST_CASE("metric-only variation reduces to the displayed tensor pairing") {
  Rng rng(44);
  const W345State s = random_state(rng);
  VariationVector V;
  Eigen::MatrixXd k(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      k(i, j) = rng.symmetric();
      k(j, i) = k(i, j);
    }
  V.k = k;
  const double lhs = first_variation_w345(s, V);
  const double rhs = -2.0 * kPi * s.volN * std::sqrt(s.g6.det()) *
                     tensor_inner(w345_metric_gradient_tensor(s), k, s.g6);
  CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-14));
}

TEST_CASE("nonpositivity of the reduced functional") {
  Rng rng(45);
  for (int k = 0; k < 200; ++k) {
    const W345State s = random_state(rng);
    CHECK(f_w345(s) <= 0.0);
  }
}

TEST_CASE("GH functional values and signs") {
  const Metric id = Metric::euclidean(6);
  CHECK(f_gh(id, 1.0, Form(6, 2), 0.0, 1.0) == 0.0);
  // g = delta, h = 1, F = a e^12: value -(pi/4) a^2 in the module convention
  const double a = 0.8;
  CHECK_THAT(f_gh(id, 1.0, a * Form::basis(6, {1, 2}), 0.0, 1.0),
             Catch::Matchers::WithinAbs(-kPi / 4.0 * a * a, 1e-13));
  Rng rng(46);
  for (int k = 0; k < 50; ++k) {
    const Metric g = random_metric(rng);
    const double val = f_gh(g, 0.3 + rng.uniform(), random_form(rng, 2), 0.0, 1.0);
    CHECK(val < 0.0);
  }
  CHECK_THROWS_AS(f_gh(id, 0.0, Form(6, 2), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(f_gh(id, -1.0, Form(6, 2), 0.0, 1.0), DomainError);
}

TEST_CASE("primitivity residual of admissible states is zero") {
  // an admissible tuple in the standard frame passes the induced-frame check
  const Form nu = Form::basis(6, {1, 3, 6}) - Form::basis(6, {1, 4, 5});
  const Form F = Form::basis(6, {1, 2}) - Form::basis(6, {3, 4});
  const W345State s(Metric::euclidean(6), 0.5, Form::basis(6, {2}), nu, F, 1.0);
  CHECK(w345_primitivity_residual(s) < 1e-12);
  const W345State bad(Metric::euclidean(6), 0.5, Form(6, 1), Form(6, 3), standard_omega(), 1.0);
  CHECK(w345_primitivity_residual(bad) > 0.1);
}
