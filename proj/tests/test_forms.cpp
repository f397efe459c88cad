#include <catch2/catch_amalgamated.hpp>

#include "g2flow/forms.hpp"
#include "g2flow/rng.hpp"

using namespace g2flow;

namespace {

// Independent wedge oracle: evaluate (a ^ b)(e_I) as a sum over all
// p/q splits of the index set, with no shared code path with wedge().
double shuffle_wedge_component(const Form& a, const Form& b, const std::vector<int>& idx) {
  const int p = a.degree(), q = b.degree();
  const int n = p + q;
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + p, 1);
  std::sort(pick.begin(), pick.end());
  double acc = 0.0;
  do {
    std::vector<int> ia, ib;
    for (int i = 0; i < n; ++i) (pick[i] ? ia : ib).push_back(idx[i]);
    // parity of the shuffle moving (ia, ib) back to idx order:
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (pick[i] == 0 && pick[j] == 1) ++inv;
    const double sign = (inv % 2) ? -1.0 : 1.0;
    acc += sign * a.component(std::span<const int>(ia.data(), ia.size())) *
           b.component(std::span<const int>(ib.data(), ib.size()));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return acc;
}

Form random_form(Rng& rng, int dim, int deg) {
  Form f(dim, deg);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = rng.symmetric();
  return f;
}

Metric random_metric(Rng& rng, int dim) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) += 0.2 * rng.symmetric();
  return Metric(A.transpose() * A);
}

}  // namespace

TEST_CASE("wedge basis cases") {
  CHECK((wedge(Form::basis(7, {1}), Form::basis(7, {2})) - Form::basis(7, {1, 2})).norm_inf() == 0.0);
  // omega^3 = 6 e^{123456}
  const Form w = standard_omega();
  const Form w3 = wedge(wedge(w, w), w);
  CHECK((w3 - 6.0 * euclidean_volume(6)).norm_inf() == 0.0);
  // odd-degree forms square to zero exactly
  Rng rng(1);
  for (int k = 0; k < 5; ++k) {
    const Form a = random_form(rng, 7, 3);
    CHECK(wedge(a, a).norm_inf() == 0.0);
  }
}

TEST_CASE("wedge agrees with the shuffle-sum oracle") {
  Rng rng(2);
  for (auto [p, q] : {std::pair{1, 2}, {2, 2}, {1, 3}, {2, 3}, {3, 3}}) {
    const Form a = random_form(rng, 6, p);
    const Form b = random_form(rng, 6, q);
    const Form ab = wedge(a, b);
    const auto& t = detail::degree_table(6, p + q);
    for (Eigen::Index r = 0; r < ab.size(); ++r) {
      auto id0 = detail::mask_indices(t.masks[r]);
      std::vector<int> idx;
      for (int i : id0) idx.push_back(i + 1);
      CHECK_THAT(ab[r], Catch::Matchers::WithinAbs(shuffle_wedge_component(a, b, idx), 1e-13));
    }
  }
}

TEST_CASE("graded commutativity holds exactly") {
  Rng rng(3);
  for (auto [p, q] : {std::pair{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 4}}) {
    const Form a = random_form(rng, 7, p);
    const Form b = random_form(rng, 7, q);
    const double sign = (p * q % 2) ? -1.0 : 1.0;
    CHECK((wedge(a, b) - sign * wedge(b, a)).norm_inf() == 0.0);
  }
}

TEST_CASE("wedge rejects shape errors") {
  CHECK_THROWS_AS(wedge(Form(6, 1), Form(7, 1)), DomainError);
  CHECK_THROWS_AS(wedge(Form(6, 4), Form(6, 3)), DomainError);
}

TEST_CASE("contraction basics and the derivation property") {
  CHECK((contract(Eigen::VectorXd::Unit(7, 0), Form::basis(7, {1, 2, 3})) -
         Form::basis(7, {2, 3})).norm_inf() == 0.0);
  const Form iphi = contract(Eigen::VectorXd::Unit(7, 0), standard_phi());
  Form expect = Form::basis(7, {2, 3}) + Form::basis(7, {4, 5}) + Form::basis(7, {6, 7});
  CHECK((iphi - expect).norm_inf() == 0.0);
  CHECK_THROWS_AS(contract(Eigen::VectorXd::Unit(7, 0), Form(7, 0)), DomainError);

  Rng rng(4);
  Eigen::VectorXd v(7);
  for (int i = 0; i < 7; ++i) v[i] = rng.symmetric();
  const Form a = random_form(rng, 7, 2), b = random_form(rng, 7, 3);
  const Form lhs = contract(v, wedge(a, b));
  const Form rhs = wedge(contract(v, a), b) + wedge(a, contract(v, b));
  CHECK((lhs - rhs).norm_inf() < 1e-14);
}

TEST_CASE("hodge star on the Euclidean model") {
  const Metric g = Metric::euclidean(7);
  const Form vol = euclidean_volume(7);
  CHECK((hodge(Form::basis(7, {1}), g, vol) - Form::basis(7, {2, 3, 4, 5, 6, 7})).norm_inf() == 0.0);
  CHECK((hodge(standard_phi(), g, vol) - standard_psi()).norm_inf() == 0.0);
}

TEST_CASE("hodge involution and pairing identity for random metrics") {
  Rng rng(5);
  for (int dim : {6, 7}) {
    const Metric g = random_metric(rng, dim);
    const Form vol = euclidean_volume(dim);
    for (int k = 1; k < dim; ++k) {
      const Form a = random_form(rng, dim, k);
      const Form aa = hodge(hodge(a, g, vol), g, vol);
      const double sign = (k * (dim - k)) % 2 ? -1.0 : 1.0;
      CHECK((aa - sign * a).norm_inf() < 1e-14);
      const Form b = random_form(rng, dim, k);
      // a ^ *b = <a,b> dV_g
      const Form lhs = wedge(a, hodge(b, g, vol));
      const double dv = std::sqrt(g.det());
      CHECK_THAT(lhs[0], Catch::Matchers::WithinAbs(inner(a, b, g) * dv, 1e-14));
    }
  }
}

TEST_CASE("inner product conventions") {
  const Metric g = Metric::euclidean(6);
  CHECK(inner(Form::basis(6, {1, 2}), Form::basis(6, {1, 2}), g) == 1.0);
  CHECK(inner(standard_omega(), standard_omega(), g) == 3.0);
  CHECK(inner(Form::basis(6, {1, 2}), Form::basis(6, {3, 4}), g) == 0.0);
  CHECK_THROWS_AS(inner(Form(6, 2), Form(6, 3), g), DomainError);
  // symmetric and positive definite for a random metric
  Rng rng(8);
  const Metric rg = random_metric(rng, 6);
  const Form a = random_form(rng, 6, 3), b = random_form(rng, 6, 3);
  CHECK_THAT(inner(a, b, rg), Catch::Matchers::WithinAbs(inner(b, a, rg), 1e-13));
  CHECK(inner(a, a, rg) > 0.0);
}

TEST_CASE("contraction is adjoint to wedging with the flat") {
  Rng rng(6);
  const Metric g = random_metric(rng, 7);
  Eigen::VectorXd v(7);
  for (int i = 0; i < 7; ++i) v[i] = rng.symmetric();
  const Form a = random_form(rng, 7, 3), b = random_form(rng, 7, 2);
  CHECK_THAT(inner(contract(v, a), b, g),
             Catch::Matchers::WithinAbs(inner(a, wedge(flat(v, g), b), g), 1e-14));
}

TEST_CASE("standard model forms") {
  const Form phi = standard_phi();
  CHECK(phi.component({1, 2, 3}) == 1.0);
  CHECK(phi.component({2, 5, 7}) == -1.0);
  CHECK(phi.component({5, 2, 7}) == 1.0);  // antisymmetric accessor
  CHECK(phi.component({1, 1, 2}) == 0.0);

  const Form w = standard_omega(), op = standard_omega_plus(), om = standard_omega_minus();
  CHECK(wedge(w, op).norm_inf() == 0.0);
  const Form lhs = (1.0 / 6.0) * wedge(wedge(w, w), w);
  const Form rhs = 0.25 * wedge(op, om);
  CHECK((lhs - rhs).norm_inf() == 0.0);
}

TEST_CASE("metric validation") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(6, 6);
  m(0, 0) = -1.0;
  CHECK_THROWS_AS(Metric(m), PositivityError);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(6, 6);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(Metric(asym), DomainError);
}

TEST_CASE("pullback respects products and evaluation") {
  Rng rng(7);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) += 0.3 * rng.symmetric();
  const Form a = random_form(rng, 6, 2), b = random_form(rng, 6, 2);
  CHECK((pullback(wedge(a, b), A) - wedge(pullback(a, A), pullback(b, A))).norm_inf() < 1e-13);
  Eigen::MatrixXd V(6, 2);
  V.col(0) = A.col(2);
  V.col(1) = A.col(4);
  Eigen::MatrixXd E(6, 2);
  E.col(0) = Eigen::VectorXd::Unit(6, 2);
  E.col(1) = Eigen::VectorXd::Unit(6, 4);
  CHECK_THAT(evaluate(a, V), Catch::Matchers::WithinAbs(evaluate(pullback(a, A), E), 1e-13));
}
