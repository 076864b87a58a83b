#include "evth/calculus.hpp"

#include <cmath>
#include <vector>

namespace evth {

namespace {

// Wrapped positions along one axis, shared by all three (cubic grid).
struct WrapTables {
  std::vector<int> p1, p2, m1, m2;
  explicit WrapTables(int n) : p1(n), p2(n), m1(n), m2(n) {
    for (int i = 0; i < n; ++i) {
      p1[i] = (i + 1) % n;
      p2[i] = (i + 2) % n;
      m1[i] = (i + n - 1) % n;
      m2[i] = (i + n - 2) % n;
    }
  }
};

}  // namespace

void fd_derivative(const GridSpec& grid, std::span<const double> in, int axis,
                   std::span<double> out) {
  const int n = grid.npts();
  const double c = 1.0 / (12.0 * grid.spacing());
  const WrapTables w(n);
  const double* __restrict f = in.data();
  double* __restrict d = out.data();
  const std::size_t nn = static_cast<std::size_t>(n) * n;

  if (axis == 0) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        const std::size_t base = static_cast<std::size_t>(j) * n + k * nn;
        for (int i = 0; i < n; ++i) {
          d[base + i] = c * (8.0 * (f[base + w.p1[i]] - f[base + w.m1[i]]) -
                             (f[base + w.p2[i]] - f[base + w.m2[i]]));
        }
      }
  } else if (axis == 1) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * n + k * nn;
        const std::size_t rp1 = static_cast<std::size_t>(w.p1[j]) * n + k * nn;
        const std::size_t rp2 = static_cast<std::size_t>(w.p2[j]) * n + k * nn;
        const std::size_t rm1 = static_cast<std::size_t>(w.m1[j]) * n + k * nn;
        const std::size_t rm2 = static_cast<std::size_t>(w.m2[j]) * n + k * nn;
        for (int i = 0; i < n; ++i) {
          d[row + i] = c * (8.0 * (f[rp1 + i] - f[rm1 + i]) - (f[rp2 + i] - f[rm2 + i]));
        }
      }
  } else {
    for (int k = 0; k < n; ++k) {
      const std::size_t sp1 = static_cast<std::size_t>(w.p1[k]) * nn;
      const std::size_t sp2 = static_cast<std::size_t>(w.p2[k]) * nn;
      const std::size_t sm1 = static_cast<std::size_t>(w.m1[k]) * nn;
      const std::size_t sm2 = static_cast<std::size_t>(w.m2[k]) * nn;
      const std::size_t s0 = static_cast<std::size_t>(k) * nn;
      for (std::size_t q = 0; q < nn; ++q) {
        d[s0 + q] = c * (8.0 * (f[sp1 + q] - f[sm1 + q]) - (f[sp2 + q] - f[sm2 + q]));
      }
    }
  }
}

ScalarField fd_derivative(const ScalarField& f, int axis) {
  ScalarField out(f.grid());
  fd_derivative(f.grid(), f.comp(0), axis, out.comp(0));
  return out;
}

MetricPointwise metric_pointwise(const SymTensorField& g) {
  const GridSpec& grid = g.grid();
  MetricPointwise out{SymTensorField(grid), ScalarField(grid)};
  const std::size_t np = grid.size();
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gp = load_sym3(g, p);
    const auto minors = gp.leading_minors();
    for (double m : minors)
      if (!(m > 0.0)) throw NonPositiveDefiniteError(p, m);
    out.det[p] = minors[2];
    store_sym3(out.inverse, p, gp.inverse_given_det(minors[2]));
  }
  return out;
}

Rank3Field christoffel(const SymTensorField& g) {
  return christoffel(g, metric_pointwise(g).inverse);
}

StateGeometry compute_geometry(const SymTensorField& g) {
  StateGeometry geo{metric_pointwise(g), Rank3Field(), SymTensorField()};
  geo.gamma = christoffel(g, geo.mp.inverse);
  geo.ric = ricci(g, geo.mp.inverse, geo.gamma);
  return geo;
}

Rank3Field christoffel(const SymTensorField& g, const SymTensorField& ginv) {
  const GridSpec& grid = g.grid();
  // dg[a] holds d_a g, all six components.
  SymTensorField dg[3] = {SymTensorField(grid), SymTensorField(grid), SymTensorField(grid)};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 6; ++c) fd_derivative(grid, g.comp(c), a, dg[a].comp(c));

  Rank3Field out(grid);
  const std::size_t np = grid.size();
  const ConstSym3Planes gip(ginv);
  const double* __restrict dgp_plane[3][6];
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 6; ++c) dgp_plane[a][c] = dg[a].plane(c);
  double* __restrict out_plane[3][6];
  for (int c = 0; c < 3; ++c)
    for (int ab = 0; ab < 6; ++ab) out_plane[c][ab] = out.plane_cab(c, ab);

  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = gip.load(p);
    double dgp[3][3][3];  // dgp[a][i][j] = d_a g_ij
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          const double v = dgp_plane[a][SymTensorField::sym_index(i, j)][p];
          dgp[a][i][j] = v;
          dgp[a][j][i] = v;
        }
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        const int ab = SymTensorField::sym_index(a, b);
        for (int c = 0; c < 3; ++c) {
          double s = 0.0;
          for (int d = 0; d < 3; ++d)
            s += gi(c, d) * (dgp[a][d][b] + dgp[b][d][a] - dgp[d][a][b]);
          out_plane[c][ab][p] = 0.5 * s;
        }
      }
  }
  return out;
}

SymTensorField ricci(const SymTensorField& g) {
  const auto mp = metric_pointwise(g);
  return ricci(g, mp.inverse, christoffel(g, mp.inverse));
}

SymTensorField ricci(const SymTensorField& g, const SymTensorField& /*ginv*/,
                     const Rank3Field& gamma) {
  const GridSpec& grid = g.grid();
  const std::size_t np = grid.size();

  // div_term_ij = d_c Gamma^c_ij (sum over c of the axis-c derivative).
  SymTensorField div_term(grid);
  {
    ScalarField tmp(grid);
    for (int ab = 0; ab < 6; ++ab) {
      double* acc = div_term.plane(ab);
      for (int c = 0; c < 3; ++c) {
        fd_derivative(grid, std::span<const double>(gamma.plane_cab(c, ab), np), c,
                      tmp.comp(0));
        const double* t = tmp.data();
        if (c == 0)
          for (std::size_t p = 0; p < np; ++p) acc[p] = t[p];
        else
          for (std::size_t p = 0; p < np; ++p) acc[p] += t[p];
      }
    }
  }

  // trace vector V_j = Gamma^c_cj and its derivatives d_i V_j.
  Vec3Field trace_vec(grid);
  for (int j = 0; j < 3; ++j) {
    double* v = trace_vec.plane(j);
    for (std::size_t p = 0; p < np; ++p) {
      v[p] = gamma.plane_cab(0, SymTensorField::sym_index(0, j))[p] +
             gamma.plane_cab(1, SymTensorField::sym_index(1, j))[p] +
             gamma.plane_cab(2, SymTensorField::sym_index(2, j))[p];
    }
  }
  ScalarField dV[3][3];  // dV[i][j] = d_i V_j
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      dV[i][j] = ScalarField(grid);
      fd_derivative(grid, trace_vec.comp(j), i, dV[i][j].comp(0));
    }

  SymTensorField out(grid);
  const double* __restrict gam_plane[3][6];
  for (int c = 0; c < 3; ++c)
    for (int ab = 0; ab < 6; ++ab) gam_plane[c][ab] = gamma.plane_cab(c, ab);
  const double* __restrict trv_plane[3] = {trace_vec.plane(0), trace_vec.plane(1),
                                           trace_vec.plane(2)};
  const double* __restrict dV_plane[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dV_plane[i][j] = dV[i][j].data();
  const ConstSym3Planes divp(div_term);
  const Sym3Planes outp(out);

  for (std::size_t p = 0; p < np; ++p) {
    double gam[3][3][3];  // gam[c][a][b]
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          const double v = gam_plane[c][SymTensorField::sym_index(a, b)][p];
          gam[c][a][b] = v;
          gam[c][b][a] = v;
        }
    double trv[3];
    for (int c = 0; c < 3; ++c) trv[c] = trv_plane[c][p];

    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const int ij = SymTensorField::sym_index(i, j);
        double quad = 0.0;
        for (int d = 0; d < 3; ++d) {
          quad += trv[d] * gam[d][i][j];
          for (int c = 0; c < 3; ++c) quad -= gam[c][i][d] * gam[d][c][j];
        }
        // Composed first-derivative stencils commute across axes, so the
        // d_i V_j term stays symmetric to round-off; symmetrize anyway.
        const double dV_sym = 0.5 * (dV_plane[i][j][p] + dV_plane[j][i][p]);
        outp.c[ij][p] = divp.c[ij][p] - dV_sym + quad;
      }
  }
  return out;
}

ScalarField scalar_curvature(const SymTensorField& g) {
  const auto mp = metric_pointwise(g);
  const auto ric = ricci(g, mp.inverse, christoffel(g, mp.inverse));
  return scalar_curvature(ric, mp.inverse);
}

ScalarField scalar_curvature(const SymTensorField& ricci_tensor,
                             const SymTensorField& ginv) {
  const GridSpec& grid = ricci_tensor.grid();
  ScalarField out(grid);
  const std::size_t np = grid.size();
  for (std::size_t p = 0; p < np; ++p) {
    out[p] = trace_with_inverse(load_sym3(ricci_tensor, p), load_sym3(ginv, p));
  }
  return out;
}

SymTensorField covariant_hessian(const ScalarField& s, const SymTensorField& g) {
  return covariant_hessian(s, christoffel(g));
}

SymTensorField covariant_hessian(const ScalarField& s, const Rank3Field& gamma) {
  const GridSpec& grid = s.grid();
  ScalarField ds[3];
  for (int a = 0; a < 3; ++a) ds[a] = fd_derivative(s, a);

  SymTensorField out(grid);
  const std::size_t np = grid.size();
  ScalarField dds(grid);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      fd_derivative(grid, ds[i].comp(0), j, dds.comp(0));
      const int ij = SymTensorField::sym_index(i, j);
      double* o = out.plane(ij);
      const double* second = dds.data();
      const double* g0 = gamma.plane_cab(0, ij);
      const double* g1 = gamma.plane_cab(1, ij);
      const double* g2 = gamma.plane_cab(2, ij);
      const double* d0 = ds[0].data();
      const double* d1 = ds[1].data();
      const double* d2 = ds[2].data();
      for (std::size_t p = 0; p < np; ++p) {
        o[p] = second[p] - (g0[p] * d0[p] + g1[p] * d1[p] + g2[p] * d2[p]);
      }
    }
  return out;
}

Rank3Field covariant_derivative_sym(const SymTensorField& k, const Rank3Field& gamma) {
  const GridSpec& grid = k.grid();
  const std::size_t np = grid.size();
  Rank3Field out(grid);
  ScalarField dk(grid);
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const int ij = SymTensorField::sym_index(i, j);
        fd_derivative(grid, k.comp(ij), a, dk.comp(0));
        double* __restrict o = out.plane_cab(a, ij);
        const double* __restrict d = dk.data();
        const double* __restrict gam_ai[3];
        const double* __restrict gam_aj[3];
        const double* __restrict k_cj[3];
        const double* __restrict k_ic[3];
        for (int c = 0; c < 3; ++c) {
          gam_ai[c] = gamma.plane_cab(c, SymTensorField::sym_index(a, i));
          gam_aj[c] = gamma.plane_cab(c, SymTensorField::sym_index(a, j));
          k_cj[c] = k.plane(SymTensorField::sym_index(c, j));
          k_ic[c] = k.plane(SymTensorField::sym_index(i, c));
        }
        for (std::size_t p = 0; p < np; ++p) {
          o[p] = d[p] - gam_ai[0][p] * k_cj[0][p] - gam_ai[1][p] * k_cj[1][p] -
                 gam_ai[2][p] * k_cj[2][p] - gam_aj[0][p] * k_ic[0][p] -
                 gam_aj[1][p] * k_ic[1][p] - gam_aj[2][p] * k_ic[2][p];
        }
      }
  }
  return out;
}

namespace {

template <class Norm2At>
NormPair reduce_norms(const GridSpec& grid, const SymTensorField& g, bool weighted,
                      Norm2At&& norm2_at) {
  const auto mp = metric_pointwise(g);
  const std::size_t np = grid.size();
  double sup2 = 0.0;
  double sum = 0.0;
  const double h3 = grid.cell_volume();
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = load_sym3(mp.inverse, p);
    const double n2 = norm2_at(p, gi);
    if (n2 > sup2) sup2 = n2;
    sum += weighted ? n2 * std::sqrt(mp.det[p]) * h3 : n2 * h3;
  }
  return {std::sqrt(sup2), std::sqrt(sum)};
}

}  // namespace

NormPair norms(const ScalarField& t, const SymTensorField& g, bool weighted) {
  return reduce_norms(t.grid(), g, weighted, [&](std::size_t p, const Sym3&) {
    return t[p] * t[p];
  });
}

NormPair norms(const Vec3Field& t, const SymTensorField& g, bool weighted) {
  return reduce_norms(t.grid(), g, weighted, [&](std::size_t p, const Sym3& gi) {
    return norm2_cov_vector({t.plane(0)[p], t.plane(1)[p], t.plane(2)[p]}, gi);
  });
}

NormPair norms(const SymTensorField& t, const SymTensorField& g, bool weighted) {
  return reduce_norms(t.grid(), g, weighted, [&](std::size_t p, const Sym3& gi) {
    return norm2_sym_cov(load_sym3(t, p), gi);
  });
}

}  // namespace evth
