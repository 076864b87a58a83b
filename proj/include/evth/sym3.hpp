#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "evth/grid.hpp"

namespace evth {

/// Symmetric 3x3 matrix value, component order matching SymTensorField.
struct Sym3 {
  double xx, xy, xz, yy, yz, zz;

  static Sym3 identity() { return {1.0, 0.0, 0.0, 1.0, 0.0, 1.0}; }
  static Sym3 zero() { return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }

  double operator()(int a, int b) const {
    const double* v = &xx;
    return v[SymTensorField::sym_index(a, b)];
  }
  double& comp(int ab) { return (&xx)[ab]; }
  double comp(int ab) const { return (&xx)[ab]; }

  double trace() const { return xx + yy + zz; }

  double det() const {
    return xx * (yy * zz - yz * yz) - xy * (xy * zz - yz * xz) +
           xz * (xy * yz - yy * xz);
  }

  /// Leading principal minors m1, m2, m3 (Sylvester criterion).
  std::array<double, 3> leading_minors() const {
    return {xx, xx * yy - xy * xy, det()};
  }

  Sym3 inverse_given_det(double d) const {
    const double inv = 1.0 / d;
    return {(yy * zz - yz * yz) * inv, (xz * yz - xy * zz) * inv,
            (xy * yz - xz * yy) * inv, (xx * zz - xz * xz) * inv,
            (xy * xz - xx * yz) * inv, (xx * yy - xy * xy) * inv};
  }

  Sym3 scaled(double s) const { return {s * xx, s * xy, s * xz, s * yy, s * yz, s * zz}; }

  Sym3 plus(const Sym3& o, double w = 1.0) const {
    return {xx + w * o.xx, xy + w * o.xy, xz + w * o.xz,
            yy + w * o.yy, yz + w * o.yz, zz + w * o.zz};
  }
};

inline Sym3 load_sym3(const SymTensorField& f, std::size_t p) {
  return {f.plane(0)[p], f.plane(1)[p], f.plane(2)[p],
          f.plane(3)[p], f.plane(4)[p], f.plane(5)[p]};
}

inline void store_sym3(SymTensorField& f, std::size_t p, const Sym3& v) {
  for (int c = 0; c < 6; ++c) f.plane(c)[p] = v.comp(c);
}

/// Hoisted plane pointers for hot per-point loops.
struct ConstSym3Planes {
  const double* c[6];
  explicit ConstSym3Planes(const SymTensorField& f)
      : c{f.plane(0), f.plane(1), f.plane(2), f.plane(3), f.plane(4), f.plane(5)} {}
  Sym3 load(std::size_t p) const {
    return {c[0][p], c[1][p], c[2][p], c[3][p], c[4][p], c[5][p]};
  }
};

struct Sym3Planes {
  double* c[6];
  explicit Sym3Planes(SymTensorField& f)
      : c{f.plane(0), f.plane(1), f.plane(2), f.plane(3), f.plane(4), f.plane(5)} {}
  void store(std::size_t p, const Sym3& v) const {
    for (int q = 0; q < 6; ++q) c[q][p] = v.comp(q);
  }
};

/// trace of g^{-1} t  =  g^{ab} t_ab.
inline double trace_with_inverse(const Sym3& t, const Sym3& ginv) {
  return ginv.xx * t.xx + ginv.yy * t.yy + ginv.zz * t.zz +
         2.0 * (ginv.xy * t.xy + ginv.xz * t.xz + ginv.yz * t.yz);
}

/// Raise both indices: t^{ab} = g^{ai} g^{bj} t_ij.
inline Sym3 raise_both(const Sym3& t, const Sym3& ginv) {
  // m = ginv * t (full 3x3), result = m * ginv, symmetric.
  double m[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += ginv(a, c) * t(c, b);
      m[a][b] = s;
    }
  Sym3 out;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += m[a][c] * ginv(c, b);
      out.comp(SymTensorField::sym_index(a, b)) = s;
    }
  return out;
}

/// Mixed square (t g^{-1} t)_ij = t_ia g^{ab} t_bj (symmetric, covariant).
inline Sym3 mixed_square(const Sym3& t, const Sym3& ginv) {
  double m[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += t(a, c) * ginv(c, b);
      m[a][b] = s;
    }
  Sym3 out;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += m[a][c] * t(c, b);
      out.comp(SymTensorField::sym_index(a, b)) = s;
    }
  return out;
}

/// g^{ia} g^{jb} a_ij b_ab = tr(g^{-1} a g^{-1} b) for covariant symmetric a, b.
inline double inner_sym_cov(const Sym3& a, const Sym3& b, const Sym3& ginv) {
  double ma[3][3], mb[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double sa = 0.0, sb = 0.0;
      for (int d = 0; d < 3; ++d) {
        sa += ginv(r, d) * a(d, c);
        sb += ginv(r, d) * b(d, c);
      }
      ma[r][c] = sa;
      mb[r][c] = sb;
    }
  double tr = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) tr += ma[r][c] * mb[c][r];
  return tr;
}

/// |t|_g^2 for a covariant symmetric 2-tensor: g^{ia} g^{jb} t_ij t_ab.
inline double norm2_sym_cov(const Sym3& t, const Sym3& ginv) {
  const Sym3 sq = mixed_square(t, ginv);  // (t g^{-1} t)_ij
  return trace_with_inverse(sq, ginv);    // tr(g^{-1} t g^{-1} t)
}

/// |t|_g^2 for a contravariant symmetric 2-tensor: g_ia g_jb t^ij t^ab.
inline double norm2_sym_contra(const Sym3& t, const Sym3& g) {
  return norm2_sym_cov(t, g);  // same contraction pattern with roles swapped
}

/// |v|_g^2 for a covector: g^{ij} v_i v_j.
inline double norm2_cov_vector(const std::array<double, 3>& v, const Sym3& ginv) {
  return ginv.xx * v[0] * v[0] + ginv.yy * v[1] * v[1] + ginv.zz * v[2] * v[2] +
         2.0 * (ginv.xy * v[0] * v[1] + ginv.xz * v[0] * v[2] + ginv.yz * v[1] * v[2]);
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending (analytic trig method).
inline std::array<double, 3> sym3_eigenvalues(const Sym3& a) {
  const double p1 = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
  if (p1 == 0.0) {
    std::array<double, 3> e = {a.xx, a.yy, a.zz};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double q = a.trace() / 3.0;
  const double dxx = a.xx - q, dyy = a.yy - q, dzz = a.zz - q;
  const double p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Sym3 b = {dxx / p, a.xy / p, a.xz / p, dyy / p, a.yz / p, dzz / p};
  double r = b.det() / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e = {e3, e2, e1};
  std::sort(e.begin(), e.end());
  return e;
}

/// Cholesky factor L of an SPD matrix (g = L L^T). No pivoting; caller
/// guarantees positive-definiteness.
struct Chol3 {
  double l00, l10, l11, l20, l21, l22;
};

inline Chol3 cholesky3(const Sym3& g) {
  Chol3 c;
  c.l00 = std::sqrt(g.xx);
  c.l10 = g.xy / c.l00;
  c.l20 = g.xz / c.l00;
  c.l11 = std::sqrt(g.yy - c.l10 * c.l10);
  c.l21 = (g.yz - c.l20 * c.l10) / c.l11;
  c.l22 = std::sqrt(g.zz - c.l20 * c.l20 - c.l21 * c.l21);
  return c;
}

/// Generalized eigenvalues of (k, g): roots of det(k - lambda g) = 0, i.e.
/// the eigenvalues of the mixed tensor k^i_j. Computed as eig(L^{-1} k L^{-T}).
inline std::array<double, 3> generalized_eigenvalues(const Sym3& k, const Sym3& g) {
  if (k.xy == 0.0 && k.xz == 0.0 && k.yz == 0.0 && g.xy == 0.0 && g.xz == 0.0 &&
      g.yz == 0.0) {
    std::array<double, 3> e = {k.xx / g.xx, k.yy / g.yy, k.zz / g.zz};
    std::sort(e.begin(), e.end());
    return e;
  }
  const Chol3 c = cholesky3(g);
  // Solve L X = K column by column, then S = X L^{-T} (symmetric).
  double K[3][3] = {{k.xx, k.xy, k.xz}, {k.xy, k.yy, k.yz}, {k.xz, k.yz, k.zz}};
  double X[3][3];
  for (int col = 0; col < 3; ++col) {
    X[0][col] = K[0][col] / c.l00;
    X[1][col] = (K[1][col] - c.l10 * X[0][col]) / c.l11;
    X[2][col] = (K[2][col] - c.l20 * X[0][col] - c.l21 * X[1][col]) / c.l22;
  }
  // S = X L^{-T}: solve S L^T = X, i.e. for each row r: back-substitution.
  double S[3][3];
  for (int r = 0; r < 3; ++r) {
    S[r][0] = X[r][0] / c.l00;
    S[r][1] = (X[r][1] - c.l10 * S[r][0]) / c.l11;
    S[r][2] = (X[r][2] - c.l20 * S[r][0] - c.l21 * S[r][1]) / c.l22;
  }
  const Sym3 s = {S[0][0], 0.5 * (S[0][1] + S[1][0]), 0.5 * (S[0][2] + S[2][0]),
                  S[1][1], 0.5 * (S[1][2] + S[2][1]), S[2][2]};
  return sym3_eigenvalues(s);
}

/// Operator norm of k with respect to g: max |eigenvalue| of k^i_j.
inline double op_norm_wrt(const Sym3& k, const Sym3& g) {
  const auto e = generalized_eigenvalues(k, g);
  return std::max(std::abs(e[0]), std::abs(e[2]));
}

}  // namespace evth
