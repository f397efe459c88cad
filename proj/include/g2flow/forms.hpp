#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "g2flow/errors.hpp"

namespace g2flow {

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

namespace detail {

/// Basis bookkeeping for Lambda^k(R^dim). Basis covectors e^{i1..ik} with
/// i1<...<ik are stored in lexicographic order and addressed either by rank
/// or by the bitmask of their (0-based) index set.
struct DegreeTable {
  std::vector<int> masks;        // rank -> bitmask
  std::array<int, 129> rank{};   // bitmask -> rank, -1 if degree mismatch
};

inline const DegreeTable& degree_table(int dim, int k) {
  static std::array<std::array<DegreeTable, 8>, 8> tables = [] {
    std::array<std::array<DegreeTable, 8>, 8> t{};
    for (int n = 1; n <= 7; ++n) {
      for (int deg = 0; deg <= n; ++deg) {
        DegreeTable& dt = t[n][deg];
        dt.rank.fill(-1);
        std::vector<int> idx(deg);
        for (int i = 0; i < deg; ++i) idx[i] = i;
        while (true) {
          int mask = 0;
          for (int i : idx) mask |= 1 << i;
          dt.rank[mask] = static_cast<int>(dt.masks.size());
          dt.masks.push_back(mask);
          // next increasing multi-index in lex order
          int p = deg - 1;
          while (p >= 0 && idx[p] == n - deg + p) --p;
          if (p < 0) break;
          ++idx[p];
          for (int q = p + 1; q < deg; ++q) idx[q] = idx[q - 1] + 1;
        }
      }
    }
    return t;
  }();
  return tables[dim][k];
}

/// Sign of the shuffle sorting the concatenation (I, J) of two disjoint
/// sorted index sets, +1/-1.
inline int merge_sign(int mask_a, int mask_b) {
  int inversions = 0;
  int b = mask_b;
  while (b) {
    const int j = std::countr_zero(static_cast<unsigned>(b));
    inversions += std::popcount(static_cast<unsigned>(mask_a) >> (j + 1));
    b &= b - 1;
  }
  return (inversions & 1) ? -1 : 1;
}

inline std::vector<int> mask_indices(int mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(static_cast<unsigned>(mask)));
    mask &= mask - 1;
  }
  return out;
}

}  // namespace detail

/// Riemannian metric on R^dim (dim 6 or 7). Symmetric positive definite,
/// validated on construction; inverse and determinant are cached.
class Metric {
 public:
  explicit Metric(const Eigen::MatrixXd& components) : m_(components) {
    if (m_.rows() != m_.cols() || (m_.rows() != 6 && m_.rows() != 7))
      throw DomainError("Metric: expected a 6x6 or 7x7 matrix");
    const double scale = std::max(1.0, m_.norm());
    if ((m_ - m_.transpose()).norm() > 1e-10 * scale)
      throw DomainError("Metric: matrix is not symmetric");
    m_ = 0.5 * (m_ + m_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
    min_eig_ = es.eigenvalues().minCoeff();
    if (min_eig_ <= 0.0)
      throw PositivityError("Metric: matrix is not positive definite (min eigenvalue " +
                            std::to_string(min_eig_) + ")");
    inv_ = m_.inverse();
    det_ = m_.determinant();
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  const Eigen::MatrixXd& inverse() const { return inv_; }
  double det() const { return det_; }
  double min_eigenvalue() const { return min_eig_; }

  static Metric euclidean(int dim) { return Metric(Eigen::MatrixXd::Identity(dim, dim)); }

 private:
  Eigen::MatrixXd m_, inv_;
  double det_ = 0.0, min_eig_ = 0.0;
};

/// A graded exterior element on an oriented inner-product space of dimension
/// 6 or 7. Coefficients sit on the lexicographic basis of strictly increasing
/// multi-indices; all sign bookkeeping goes through permutation parity.
class Form {
 public:
  Form(int dim, int degree) : dim_(dim), degree_(degree) {
    check_shape(dim, degree);
    c_ = Eigen::VectorXd::Zero(binomial(dim, degree));
  }

  Form(int dim, int degree, Eigen::VectorXd coeffs) : dim_(dim), degree_(degree), c_(std::move(coeffs)) {
    check_shape(dim, degree);
    if (c_.size() != binomial(dim, degree))
      throw DomainError("Form: coefficient vector has wrong length");
  }

  /// Basis covector e^{i1...ik} (1-based indices, arbitrary order, with sign).
  static Form basis(int dim, std::initializer_list<int> indices) {
    Form f(dim, static_cast<int>(indices.size()));
    std::vector<int> idx(indices);
    int sign = sort_parity(idx);
    if (sign == 0) return f;
    int mask = 0;
    for (int i : idx) {
      if (i < 1 || i > dim) throw DomainError("Form::basis: index out of range");
      mask |= 1 << (i - 1);
    }
    f.c_[detail::degree_table(dim, f.degree_).rank[mask]] = sign;
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  Eigen::Index size() const { return c_.size(); }
  const Eigen::VectorXd& coeffs() const { return c_; }
  Eigen::VectorXd& coeffs() { return c_; }
  double operator[](Eigen::Index i) const { return c_[i]; }
  double& operator[](Eigen::Index i) { return c_[i]; }

  /// Fully antisymmetric coefficient f_{i1...ik} for arbitrary 1-based
  /// indices (0 on repetition).
  double component(std::span<const int> indices) const {
    if (static_cast<int>(indices.size()) != degree_)
      throw DomainError("Form::component: wrong number of indices");
    std::vector<int> idx(indices.begin(), indices.end());
    const int sign = sort_parity(idx);
    if (sign == 0) return 0.0;
    int mask = 0;
    for (int i : idx) mask |= 1 << (i - 1);
    return sign * c_[detail::degree_table(dim_, degree_).rank[mask]];
  }
  double component(std::initializer_list<int> indices) const {
    return component(std::span<const int>(indices.begin(), indices.size()));
  }

  Form& operator+=(const Form& o) {
    require_same_shape(o);
    c_ += o.c_;
    return *this;
  }
  Form& operator-=(const Form& o) {
    require_same_shape(o);
    c_ -= o.c_;
    return *this;
  }
  Form& operator*=(double s) {
    c_ *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(double s, Form a) { return a *= s; }
  friend Form operator*(Form a, double s) { return a *= s; }
  friend Form operator-(Form a) { return a *= -1.0; }

  double norm_inf() const { return c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0; }

  bool is_zero(double tol = 0.0) const { return norm_inf() <= tol; }

 private:
  static void check_shape(int dim, int degree) {
    if (dim != 6 && dim != 7) throw DomainError("Form: dimension must be 6 or 7");
    if (degree < 0 || degree > dim) throw DomainError("Form: degree out of range");
  }
  void require_same_shape(const Form& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw DomainError("Form: shape mismatch (dim,degree)");
  }
  static int sort_parity(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
      for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
        std::swap(idx[j - 1], idx[j]);
        sign = -sign;
      }
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i - 1] == idx[i]) return 0;
    return sign;
  }

  int dim_, degree_;
  Eigen::VectorXd c_;
};

/// Exterior product. Bilinear, associative, graded-commutative; the
/// accumulation order is canonicalized so that a^b - (-1)^{pq} b^a and a^a
/// for odd degree vanish exactly, not just to roundoff.
inline Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw DomainError("wedge: dimension mismatch");
  const int dim = a.dim();
  const int p = a.degree(), q = b.degree();
  if (p + q > dim) throw DomainError("wedge: degree overflow");
  if (p > q) {
    Form out = wedge(b, a);
    if ((p * q) % 2) out *= -1.0;
    return out;
  }
  Form out(dim, p + q);
  if (p == 0) {
    out.coeffs() = a[0] * b.coeffs();
    return out;
  }
  const auto& ta = detail::degree_table(dim, p);
  const auto& tb = detail::degree_table(dim, q);
  const auto& to = detail::degree_table(dim, p + q);
  if (p < q) {
    for (Eigen::Index ia = 0; ia < a.size(); ++ia) {
      const double ca = a[ia];
      if (ca == 0.0) continue;
      const int ma = ta.masks[ia];
      for (Eigen::Index ib = 0; ib < b.size(); ++ib) {
        const double cb = b[ib];
        if (cb == 0.0) continue;
        const int mb = tb.masks[ib];
        if (ma & mb) continue;
        out[to.rank[ma | mb]] += detail::merge_sign(ma, mb) * ca * cb;
      }
    }
    return out;
  }
  // p == q: accumulate the two orientations of each unordered index pair
  // together; the symmetric grouping is what makes the graded identities
  // float-exact.
  const double flip = (p * q) % 2 ? -1.0 : 1.0;
  for (Eigen::Index ia = 0; ia < a.size(); ++ia) {
    const int ma = ta.masks[ia];
    for (Eigen::Index ib = ia + 1; ib < b.size(); ++ib) {
      const int mb = tb.masks[ib];
      if (ma & mb) continue;
      const double s1 = detail::merge_sign(ma, mb);
      const double s2 = flip * s1;
      out[to.rank[ma | mb]] += s1 * (a[ia] * b[ib]) + s2 * (a[ib] * b[ia]);
    }
  }
  return out;
}

/// Interior product iota_v a. Degree drops by one; satisfies the signed
/// Leibniz rule over the wedge.
inline Form contract(const Eigen::VectorXd& v, const Form& a) {
  if (v.size() != a.dim()) throw DomainError("contract: vector length != form dimension");
  if (a.degree() < 1) throw DomainError("contract: cannot contract a 0-form");
  const int dim = a.dim();
  Form out(dim, a.degree() - 1);
  const auto& ta = detail::degree_table(dim, a.degree());
  const auto& to = detail::degree_table(dim, a.degree() - 1);
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    const double c = a[r];
    if (c == 0.0) continue;
    int m = ta.masks[r];
    int mm = m;
    while (mm) {
      const int j = std::countr_zero(static_cast<unsigned>(mm));
      mm &= mm - 1;
      if (v[j] == 0.0) continue;
      const int below = std::popcount(static_cast<unsigned>(m) & ((1u << j) - 1u));
      const double sign = (below & 1) ? -1.0 : 1.0;
      out[to.rank[m & ~(1 << j)]] += sign * v[j] * c;
    }
  }
  return out;
}

namespace detail {

/// Gram matrix of the lexicographic Lambda^k basis: G[I][J] = det(ginv[I,J]).
/// With this convention Euclidean basis covectors e^I are orthonormal.
inline Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& ginv, int dim, int k) {
  const auto& t = degree_table(dim, k);
  const auto n = static_cast<Eigen::Index>(t.masks.size());
  Eigen::MatrixXd G(n, n);
  if (k == 0) {
    G(0, 0) = 1.0;
    return G;
  }
  std::vector<std::vector<int>> idx(n);
  for (Eigen::Index r = 0; r < n; ++r) idx[r] = mask_indices(t.masks[r]);
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index s = r; s < n; ++s) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = ginv(idx[r][i], idx[s][j]);
      const double d = (k == 1) ? sub(0, 0) : sub.determinant();
      G(r, s) = d;
      G(s, r) = d;
    }
  }
  return G;
}

inline Form hodge_impl(const Form& a, const Eigen::MatrixXd& gram_k, double sqrt_det_g,
                       double orientation_sign) {
  const int dim = a.dim();
  const int k = a.degree();
  const auto& t = degree_table(dim, k);
  const auto& tc = degree_table(dim, dim - k);
  const int full = (1 << dim) - 1;
  Eigen::VectorXd raised = gram_k * a.coeffs();
  Form out(dim, dim - k);
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    const int m = t.masks[r];
    const int mc = full & ~m;
    out[tc.rank[mc]] += orientation_sign * sqrt_det_g * merge_sign(m, mc) * raised[r];
  }
  return out;
}

}  // namespace detail

/// Inner product <a,b>_g = sum over increasing I,J of a_I b_J det(g^{-1}[I,J]).
inline double inner(const Form& a, const Form& b, const Metric& g) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw DomainError("inner: shape mismatch");
  if (a.dim() != g.dim()) throw DomainError("inner: metric dimension mismatch");
  const Eigen::MatrixXd G = detail::gram_matrix(g.inverse(), a.dim(), a.degree());
  return a.coeffs().dot(G * b.coeffs());
}

inline double form_norm(const Form& a, const Metric& g) {
  return std::sqrt(std::max(0.0, inner(a, a, g)));
}

/// Hodge star with metric g and an orientation fixed by any nonzero top form.
/// Satisfies a ^ *b = <a,b>_g dV_g and *(*a) = (-1)^{k(n-k)} a.
inline Form hodge(const Form& a, const Metric& g, const Form& orientation) {
  if (orientation.degree() != a.dim() || orientation.dim() != a.dim())
    throw DomainError("hodge: orientation must be a top form of matching dimension");
  const double o = orientation[0];
  if (o == 0.0) throw DomainError("hodge: orientation form is zero");
  const Eigen::MatrixXd G = detail::gram_matrix(g.inverse(), a.dim(), a.degree());
  return detail::hodge_impl(a, G, std::sqrt(g.det()), o > 0 ? 1.0 : -1.0);
}

/// Musical isomorphisms.
inline Form flat(const Eigen::VectorXd& v, const Metric& g) {
  if (v.size() != g.dim()) throw DomainError("flat: dimension mismatch");
  return Form(g.dim(), 1, g.mat() * v);
}

inline Eigen::VectorXd sharp(const Form& theta, const Metric& g) {
  if (theta.degree() != 1 || theta.dim() != g.dim()) throw DomainError("sharp: expected a 1-form");
  return g.inverse() * theta.coeffs();
}

/// Pullback A^* a, i.e. (A^* a)(v_1,..,v_k) = a(A v_1,..,A v_k).
inline Form pullback(const Form& a, const Eigen::MatrixXd& A) {
  const int dim = a.dim();
  if (A.rows() != dim || A.cols() != dim) throw DomainError("pullback: matrix shape mismatch");
  const int k = a.degree();
  Form out(dim, k);
  if (k == 0) {
    out.coeffs() = a.coeffs();
    return out;
  }
  const auto& t = detail::degree_table(dim, k);
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    const auto cols = detail::mask_indices(t.masks[r]);
    double acc = 0.0;
    for (Eigen::Index s = 0; s < a.size(); ++s) {
      if (a[s] == 0.0) continue;
      const auto rows = detail::mask_indices(t.masks[s]);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = A(rows[i], cols[j]);
      acc += a[s] * ((k == 1) ? sub(0, 0) : sub.determinant());
    }
    out[r] = acc;
  }
  return out;
}

/// Evaluate a k-form on k column vectors.
inline double evaluate(const Form& a, const Eigen::MatrixXd& vectors) {
  const int k = a.degree();
  if (vectors.rows() != a.dim() || vectors.cols() != k)
    throw DomainError("evaluate: expected dim x degree matrix of column vectors");
  if (k == 0) return a[0];
  const auto& t = detail::degree_table(a.dim(), k);
  Eigen::MatrixXd sub(k, k);
  double acc = 0.0;
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    if (a[r] == 0.0) continue;
    const auto rows = detail::mask_indices(t.masks[r]);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = vectors(rows[i], j);
    acc += a[r] * ((k == 1) ? sub(0, 0) : sub.determinant());
  }
  return acc;
}

/// Antisymmetric component matrix of a 2-form, M(i,j) = a(e_i, e_j).
inline Eigen::MatrixXd two_form_matrix(const Form& a) {
  if (a.degree() != 2) throw DomainError("two_form_matrix: expected a 2-form");
  const int n = a.dim();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double c = a.component({i, j});
      M(i - 1, j - 1) = c;
      M(j - 1, i - 1) = -c;
    }
  return M;
}

inline Form two_form_from_matrix(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  Form a(n, 2);
  const auto& t = detail::degree_table(n, 2);
  for (Eigen::Index r = 0; r < a.size(); ++r) {
    const auto id = detail::mask_indices(t.masks[r]);
    a[r] = M(id[0], id[1]);
  }
  return a;
}

/// Standard volume form e^{1...dim}.
inline Form euclidean_volume(int dim) {
  Form f(dim, dim);
  f[0] = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Model forms.
// ---------------------------------------------------------------------------

/// phi = e^123 + e^145 + e^167 + e^246 - e^257 - e^347 - e^356 on R^7.
inline Form standard_phi() {
  Form f = Form::basis(7, {1, 2, 3});
  f += Form::basis(7, {1, 4, 5});
  f += Form::basis(7, {1, 6, 7});
  f += Form::basis(7, {2, 4, 6});
  f -= Form::basis(7, {2, 5, 7});
  f -= Form::basis(7, {3, 4, 7});
  f -= Form::basis(7, {3, 5, 6});
  return f;
}

/// psi = *phi = e^4567 + e^2367 + e^2345 + e^1357 - e^1346 - e^1256 - e^1247.
inline Form standard_psi() {
  Form f = Form::basis(7, {4, 5, 6, 7});
  f += Form::basis(7, {2, 3, 6, 7});
  f += Form::basis(7, {2, 3, 4, 5});
  f += Form::basis(7, {1, 3, 5, 7});
  f -= Form::basis(7, {1, 3, 4, 6});
  f -= Form::basis(7, {1, 2, 5, 6});
  f -= Form::basis(7, {1, 2, 4, 7});
  return f;
}

/// omega = e^12 + e^34 + e^56 on R^6.
inline Form standard_omega() {
  Form f = Form::basis(6, {1, 2});
  f += Form::basis(6, {3, 4});
  f += Form::basis(6, {5, 6});
  return f;
}

/// Omega_+ = e^135 - e^146 - e^236 - e^245, the real part of the standard
/// complex volume form; together with standard_omega it satisfies
/// omega ^ Omega_+ = 0 and (1/6) omega^3 = (1/4) Omega_+ ^ Omega_-.
inline Form standard_omega_plus() {
  Form f = Form::basis(6, {1, 3, 5});
  f -= Form::basis(6, {1, 4, 6});
  f -= Form::basis(6, {2, 3, 6});
  f -= Form::basis(6, {2, 4, 5});
  return f;
}

/// Omega_- = e^136 + e^145 + e^235 - e^246.
inline Form standard_omega_minus() {
  Form f = Form::basis(6, {1, 3, 6});
  f += Form::basis(6, {1, 4, 5});
  f += Form::basis(6, {2, 3, 5});
  f -= Form::basis(6, {2, 4, 6});
  return f;
}

}  // namespace g2flow
