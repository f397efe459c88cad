#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "g2flow/forms.hpp"

namespace g2flow::grid {

using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Flat periodic 6-torus with fields varying along at most two axes.
/// Storage is (points x points) for two active axes and (points x 1) for one,
/// so the 6-dimensional problem stays at desk scale.
struct GridSpec {
  std::array<int, 2> axes{{0, 1}};  // active axes, 0-based in 0..5
  int n_active = 2;
  int points = 32;
  double period = 2.0 * std::numbers::pi;

  GridSpec() = default;
  GridSpec(std::array<int, 2> active, int n, int pts) : axes(active), n_active(n), points(pts) {
    if (n_active < 1 || n_active > 2) throw DomainError("GridSpec: 1 or 2 active axes");
    if (points < 8) throw DomainError("GridSpec: need at least 8 points per axis");
    if ((points & (points - 1)) != 0) throw DomainError("GridSpec: points must be a power of two");
    for (int s = 0; s < n_active; ++s)
      if (axes[s] < 0 || axes[s] > 5) throw DomainError("GridSpec: axis out of range");
    if (n_active == 2 && axes[0] == axes[1]) throw DomainError("GridSpec: axes must differ");
  }

  double spacing() const { return period / points; }
  int ext(int slot) const { return slot < n_active ? points : 1; }
  int npts() const { return ext(0) * ext(1); }
  int slot_of_axis(int axis) const {
    for (int s = 0; s < n_active; ++s)
      if (axes[s] == axis) return s;
    return -1;
  }
  bool same(const GridSpec& o) const {
    return axes == o.axes && n_active == o.n_active && points == o.points && period == o.period;
  }
};

template <class T>
struct Field {
  GridSpec spec;
  std::vector<T> v;

  Field(const GridSpec& s, const T& init) : spec(s), v(static_cast<std::size_t>(s.npts()), init) {}

  T& at(int i, int j) { return v[static_cast<std::size_t>(i) * spec.ext(1) + j]; }
  const T& at(int i, int j) const { return v[static_cast<std::size_t>(i) * spec.ext(1) + j]; }

  Field& operator+=(const Field& o) {
    for (std::size_t p = 0; p < v.size(); ++p) v[p] += o.v[p];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& x : v) x = x * s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  template <class F>
  auto map(F&& fn) const {
    using U = decltype(fn(v[0]));
    Field<U> out(spec, fn(v[0]));
    for (std::size_t p = 0; p < v.size(); ++p) out.v[p] = fn(v[p]);
    return out;
  }
};

using ScalarField = Field<double>;
using MatField = Field<Mat6>;
using FormField = Field<Form>;

/// Christoffel symbols at a point, comp[k](i,j) = Gamma^k_{ij}.
struct Christoffel {
  std::array<Mat6, 6> comp;
  Christoffel() {
    for (auto& m : comp) m.setZero();
  }
  Christoffel& operator+=(const Christoffel& o) {
    for (int k = 0; k < 6; ++k) comp[k] += o.comp[k];
    return *this;
  }
  friend Christoffel operator+(Christoffel a, const Christoffel& b) { return a += b; }
  Christoffel operator*(double s) const {
    Christoffel out;
    for (int k = 0; k < 6; ++k) out.comp[k] = comp[k] * s;
    return out;
  }
};

namespace detail_fd {

template <class T>
T zero_like(const T& t) {
  return t * 0.0;
}

}  // namespace detail_fd

/// 4th-order central first derivative along a coordinate axis (exactly zero
/// along inactive axes).
template <class T>
Field<T> partial(const Field<T>& f, int axis) {
  Field<T> out(f.spec, detail_fd::zero_like(f.v[0]));
  const int slot = f.spec.slot_of_axis(axis);
  if (slot < 0) return out;
  const int n = f.spec.points;
  const double c = 1.0 / (12.0 * f.spec.spacing());
  const int n0 = f.spec.ext(0), n1 = f.spec.ext(1);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      auto sample = [&](int off) -> const T& {
        const int ii = slot == 0 ? (i + off % n + n) % n : i;
        const int jj = slot == 1 ? (j + off % n + n) % n : j;
        return f.at(ii, jj);
      };
      out.at(i, j) = (sample(-2) + sample(2) * (-1.0) + sample(1) * 8.0 + sample(-1) * (-8.0)) * c;
    }
  return out;
}

/// 4th-order second derivative: pure along one axis, composed first
/// derivatives for mixed pairs.
template <class T>
Field<T> partial2(const Field<T>& f, int axis_a, int axis_b) {
  if (axis_a != axis_b) return partial(partial(f, axis_a), axis_b);
  Field<T> out(f.spec, detail_fd::zero_like(f.v[0]));
  const int slot = f.spec.slot_of_axis(axis_a);
  if (slot < 0) return out;
  const int n = f.spec.points;
  const double c = 1.0 / (12.0 * f.spec.spacing() * f.spec.spacing());
  const int n0 = f.spec.ext(0), n1 = f.spec.ext(1);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      auto sample = [&](int off) -> const T& {
        const int ii = slot == 0 ? (i + off % n + n) % n : i;
        const int jj = slot == 1 ? (j + off % n + n) % n : j;
        return f.at(ii, jj);
      };
      out.at(i, j) = (sample(-2) * (-1.0) + sample(2) * (-1.0) + sample(1) * 16.0 +
                      sample(-1) * 16.0 + f.at(i, j) * (-30.0)) *
                     c;
    }
  return out;
}

struct CurvatureFields {
  Field<Christoffel> gamma;
  MatField ric;
  ScalarField scal;
};

/// Coordinate-formula Christoffels, Ricci by contraction, Scal = g^{ij}R_{ij}.
inline CurvatureFields curvature(const MatField& g) {
  const GridSpec& sp = g.spec;
  MatField ginv = g.map([](const Mat6& m) { return Mat6(m.inverse()); });
  std::array<MatField, 2> dg{MatField(sp, Mat6::Zero()), MatField(sp, Mat6::Zero())};
  for (int s = 0; s < sp.n_active; ++s) dg[s] = partial(g, sp.axes[s]);

  auto dg_at = [&](int axis, std::size_t p) -> Mat6 {
    const int slot = sp.slot_of_axis(axis);
    return slot < 0 ? Mat6::Zero().eval() : dg[slot].v[p];
  };

  CurvatureFields out{Field<Christoffel>(sp, Christoffel()), MatField(sp, Mat6::Zero()),
                      ScalarField(sp, 0.0)};
  const std::size_t N = g.v.size();
  for (std::size_t p = 0; p < N; ++p) {
    Christoffel& G = out.gamma.v[p];
    std::array<Mat6, 6> d{};
    for (int a = 0; a < 6; ++a) d[a] = dg_at(a, p);
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          double acc = 0.0;
          for (int l = 0; l < 6; ++l)
            acc += ginv.v[p](k, l) * (d[i](j, l) + d[j](i, l) - d[l](i, j));
          G.comp[k](i, j) = 0.5 * acc;
          G.comp[k](j, i) = G.comp[k](i, j);
        }
  }

  std::array<Field<Christoffel>, 2> dgamma{Field<Christoffel>(sp, Christoffel()),
                                           Field<Christoffel>(sp, Christoffel())};
  for (int s = 0; s < sp.n_active; ++s) dgamma[s] = partial(out.gamma, sp.axes[s]);
  auto dGamma_at = [&](int axis, std::size_t p) -> const Christoffel* {
    const int slot = sp.slot_of_axis(axis);
    return slot < 0 ? nullptr : &dgamma[slot].v[p];
  };

  for (std::size_t p = 0; p < N; ++p) {
    const Christoffel& G = out.gamma.v[p];
    Mat6 ric = Mat6::Zero();
    // R_ij = d_k Gamma^k_ij - d_j Gamma^k_ki + Gamma^k_kl Gamma^l_ij - Gamma^k_jl Gamma^l_ki
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 6; ++k) {
          if (const Christoffel* dG = dGamma_at(k, p)) acc += dG->comp[k](i, j);
        }
        if (const Christoffel* dG = dGamma_at(j, p)) {
          for (int k = 0; k < 6; ++k) acc -= dG->comp[k](k, i);
        }
        for (int k = 0; k < 6; ++k)
          for (int l = 0; l < 6; ++l)
            acc += G.comp[k](k, l) * G.comp[l](i, j) - G.comp[k](j, l) * G.comp[l](k, i);
        ric(i, j) = acc;
      }
    ric = 0.5 * (ric + ric.transpose()).eval();
    out.ric.v[p] = ric;
    out.scal.v[p] = (ginv.v[p] * ric).trace();
  }
  return out;
}

/// Hess u = d^2 u - Gamma . du ; Delta u = tr_g Hess u.
inline std::pair<MatField, ScalarField> hessian_laplacian(const ScalarField& u, const MatField& g,
                                                          const Field<Christoffel>& gamma) {
  const GridSpec& sp = u.spec;
  std::array<ScalarField, 2> du{ScalarField(sp, 0.0), ScalarField(sp, 0.0)};
  for (int s = 0; s < sp.n_active; ++s) du[s] = partial(u, sp.axes[s]);
  Mat6 zero = Mat6::Zero();
  MatField d2u(sp, zero);
  for (int sa = 0; sa < sp.n_active; ++sa)
    for (int sb = sa; sb < sp.n_active; ++sb) {
      const ScalarField dd = partial2(u, sp.axes[sa], sp.axes[sb]);
      for (std::size_t p = 0; p < u.v.size(); ++p) {
        d2u.v[p](sp.axes[sa], sp.axes[sb]) = dd.v[p];
        d2u.v[p](sp.axes[sb], sp.axes[sa]) = dd.v[p];
      }
    }
  MatField hess(sp, zero);
  ScalarField lap(sp, 0.0);
  for (std::size_t p = 0; p < u.v.size(); ++p) {
    Mat6 h = d2u.v[p];
    for (int s = 0; s < sp.n_active; ++s) {
      const int a = sp.axes[s];
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) h(i, j) -= gamma.v[p].comp[a](i, j) * du[s].v[p];
    }
    hess.v[p] = h;
    lap.v[p] = (g.v[p].inverse() * h).trace();
  }
  return {std::move(hess), std::move(lap)};
}

inline std::pair<MatField, ScalarField> hessian_laplacian(const ScalarField& u, const MatField& g) {
  return hessian_laplacian(u, g, curvature(g).gamma);
}

/// Discrete exterior derivative d beta = sum_a e^a ^ d_a beta over the active
/// axes; d o d = 0 to roundoff because the stencils commute.
inline FormField exterior_d(const FormField& f) {
  const GridSpec& sp = f.spec;
  FormField out(sp, Form(6, f.v[0].degree() + 1));
  for (int s = 0; s < sp.n_active; ++s) {
    const int axis = sp.axes[s];
    const Form e = Form::basis(6, {axis + 1});
    const FormField df = partial(f, axis);
    for (std::size_t p = 0; p < f.v.size(); ++p) out.v[p] += wedge(e, df.v[p]);
  }
  return out;
}

/// Pointwise Hodge star with the metric field (standard orientation).
inline FormField star(const FormField& f, const MatField& g) {
  const int k = f.v[0].degree();
  FormField out(f.spec, Form(6, 6 - k));
  for (std::size_t p = 0; p < f.v.size(); ++p) {
    const Mat6 gi = g.v[p].inverse();
    const Eigen::MatrixXd G = g2flow::detail::gram_matrix(gi, 6, k);
    out.v[p] = g2flow::detail::hodge_impl(f.v[p], G, std::sqrt(g.v[p].determinant()), 1.0);
  }
  return out;
}

/// Metric codifferential d* = -*d* (n = 6, Riemannian).
inline FormField codifferential(const FormField& f, const MatField& g) {
  FormField out = star(exterior_d(star(f, g)), g);
  out *= -1.0;
  return out;
}

/// Quadrature: grid sum times cell volume, with the inactive axes
/// contributing their full period.
inline double quadrature(const ScalarField& f, const MatField& g) {
  const GridSpec& sp = f.spec;
  double cell = std::pow(sp.spacing(), sp.n_active) * std::pow(sp.period, 6 - sp.n_active);
  double acc = 0.0;
  for (std::size_t p = 0; p < f.v.size(); ++p)
    acc += f.v[p] * std::sqrt(g.v[p].determinant());
  return acc * cell;
}

/// Plain spatial mean of a scalar field.
inline double mean(const ScalarField& f) {
  double acc = 0.0;
  for (double x : f.v) acc += x;
  return acc / static_cast<double>(f.v.size());
}

}  // namespace g2flow::grid
