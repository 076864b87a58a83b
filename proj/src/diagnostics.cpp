#include "evth/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace evth {

void ThresholdConfig::validate() const {
  if (!(pointwise_threshold > 0.0) || !(integral_threshold > 0.0) ||
      !(pi_l1_threshold > 0.0))
    throw ConfigError("monitor thresholds must be positive");
  if (!(spectrum_bound > 1.0)) throw ConfigError("spectrum bound C must exceed 1");
}

namespace {

using GeometryScratch = StateGeometry;

ScalarField hamiltonian_with(const SliceState& s, const GeometryScratch& geo) {
  const GridSpec& grid = s.grid();
  ScalarField out(grid);
  const std::size_t np = grid.size();
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = load_sym3(geo.mp.inverse, p);
    const Sym3 kp = load_sym3(s.k, p);
    const Sym3 rp = load_sym3(geo.ric, p);
    const double r_scalar = trace_with_inverse(rp, gi);
    const double trk = trace_with_inverse(kp, gi);
    out[p] = r_scalar - norm2_sym_cov(kp, gi) + trk * trk;
  }
  return out;
}

Vec3Field momentum_with(const SliceState& s, const GeometryScratch& geo,
                        const Rank3Field& gradk) {
  const GridSpec& grid = s.grid();
  const std::size_t np = grid.size();

  ScalarField trk(grid);
  for (std::size_t p = 0; p < np; ++p)
    trk[p] = trace_with_inverse(load_sym3(s.k, p), load_sym3(geo.mp.inverse, p));

  Vec3Field out(grid);
  ScalarField dtrk(grid);
  for (int i = 0; i < 3; ++i) {
    fd_derivative(grid, trk.comp(0), i, dtrk.comp(0));
    double* o = out.plane(i);
    for (std::size_t p = 0; p < np; ++p) {
      const Sym3 gi = load_sym3(geo.mp.inverse, p);
      double div = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          div += gi(j, l) * gradk.plane_cab(l, SymTensorField::sym_index(i, j))[p];
      o[p] = div - dtrk[p];
    }
  }
  return out;
}

ElectricMagnetic electric_magnetic_with(const SliceState& s, const GeometryScratch& geo,
                                        const Rank3Field& gradk) {
  const GridSpec& grid = s.grid();
  const std::size_t np = grid.size();
  ElectricMagnetic out{SymTensorField(grid), SymTensorField(grid)};

  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = load_sym3(geo.mp.inverse, p);
    const Sym3 kp = load_sym3(s.k, p);
    const Sym3 rp = load_sym3(geo.ric, p);
    const double trk = trace_with_inverse(kp, gi);

    // E_ij = R_ij + (tr k) k_ij - k_i^a k_aj  (vacuum Gauss equation)
    const Sym3 ksq = mixed_square(kp, gi);
    store_sym3(out.electric, p, rp.plus(kp.scaled(trk)).plus(ksq.scaled(-1.0)));

    // eps_i^{ab} = sqrt(det g) [i c d] g^{ca} g^{db}; B = sym(eps . grad k).
    const double sg = std::sqrt(geo.mp.det[p]);
    double braw[3][3];
    for (int i = 0; i < 3; ++i) {
      const int c1 = (i + 1) % 3, c2 = (i + 2) % 3;
      for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const double eps = sg * (gi(c1, a) * gi(c2, b) - gi(c2, a) * gi(c1, b));
            sum += eps * gradk.plane_cab(a, SymTensorField::sym_index(b, j))[p];
          }
        braw[i][j] = sum;
      }
    }
    Sym3 bp;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        bp.comp(SymTensorField::sym_index(i, j)) = 0.5 * (braw[i][j] + braw[j][i]);
    store_sym3(out.magnetic, p, bp);
  }
  return out;
}

double curvature_l2_with(const SliceState& s, const GeometryScratch& geo,
                         const ElectricMagnetic& eb, const DomainMask& mask) {
  const double h3 = s.grid().cell_volume();
  const std::size_t np = s.grid().size();
  double sum = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    if (!mask.inside(p)) continue;
    const Sym3 gi = load_sym3(geo.mp.inverse, p);
    const double e2 = norm2_sym_cov(load_sym3(eb.electric, p), gi);
    const double b2 = norm2_sym_cov(load_sym3(eb.magnetic, p), gi);
    sum += (e2 + b2) * std::sqrt(geo.mp.det[p]) * h3;
  }
  return sum;
}

}  // namespace

ScalarField hamiltonian_residual(const SliceState& s) {
  return hamiltonian_with(s, compute_geometry(s.g));
}

Vec3Field momentum_residual(const SliceState& s) {
  const GeometryScratch geo = compute_geometry(s.g);
  return momentum_with(s, geo, covariant_derivative_sym(s.k, geo.gamma));
}

ElectricMagnetic electric_magnetic(const SliceState& s) {
  const GeometryScratch geo = compute_geometry(s.g);
  return electric_magnetic_with(s, geo, covariant_derivative_sym(s.k, geo.gamma));
}

double curvature_l2(const SliceState& s, const DomainMask& mask) {
  const GeometryScratch geo = compute_geometry(s.g);
  const Rank3Field gradk = covariant_derivative_sym(s.k, geo.gamma);
  return curvature_l2_with(s, geo, electric_magnetic_with(s, geo, gradk), mask);
}

std::pair<double, double> spectrum_monitor(const SliceState& s, const DomainMask& mask) {
  const std::size_t np = s.grid().size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) {
    if (!mask.inside(p)) continue;
    const auto eig = sym3_eigenvalues(load_sym3(s.g, p));
    if (eig[0] < lo) lo = eig[0];
    if (eig[2] > hi) hi = eig[2];
  }
  return {lo, hi};
}

double quasi_isometry_bound(double spectrum_c, double drift_exponent) {
  return spectrum_c * std::exp(drift_exponent);
}

double gronwall_exponent(std::span<const MonitorReport> reports) {
  double acc = 0.0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    acc += 0.5 *
           (reports[i - 1].spectrum_drift_rate + reports[i].spectrum_drift_rate) *
           std::abs(reports[i].dt);
  }
  return acc;
}

namespace {

double wave_energy_with(const SymTensorField& /*u*/, const SymTensorField& du_dtau,
                        const SliceState& s, const GeometryScratch& geo,
                        const Rank3Field& gradu, const DomainMask& mask) {
  const double h3 = s.grid().cell_volume();
  const std::size_t np = s.grid().size();
  double sum = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    if (!mask.inside(p)) continue;
    const Sym3 gi = load_sym3(geo.mp.inverse, p);
    const double du2 = norm2_sym_cov(load_sym3(du_dtau, p), gi);
    // |grad u|^2 = g^{ab} g^{ik} g^{jl} (grad_a u)_{ij} (grad_b u)_{kl}
    double grad2 = 0.0;
    Sym3 gu[3];
    for (int a = 0; a < 3; ++a)
      gu[a] = {gradu.plane_cab(a, 0)[p], gradu.plane_cab(a, 1)[p],
               gradu.plane_cab(a, 2)[p], gradu.plane_cab(a, 3)[p],
               gradu.plane_cab(a, 4)[p], gradu.plane_cab(a, 5)[p]};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        grad2 += gi(a, b) * inner_sym_cov(gu[a], gu[b], gi);
    const double inv_n2 = 1.0 / (s.n[p] * s.n[p]);
    sum += 0.5 * (inv_n2 * du2 + grad2) * std::sqrt(geo.mp.det[p]) * h3;
  }
  return sum;
}

}  // namespace

double wave_energy(const SymTensorField& u, const SymTensorField& du_dtau,
                   const SliceState& s, const DomainMask& mask) {
  const GeometryScratch geo = compute_geometry(s.g);
  const Rank3Field gradu = covariant_derivative_sym(u, geo.gamma);
  return wave_energy_with(u, du_dtau, s, geo, gradu, mask);
}

MonitorReport compute_monitor_report(const SliceState& s, const StateDerivative* du_k,
                                     const DomainMask& mask,
                                     const std::array<double, 3>& proper_time_probe,
                                     const StateGeometry* precomputed) {
  const GridSpec& grid = s.grid();
  const std::size_t np = grid.size();
  const StateGeometry owned =
      precomputed ? StateGeometry{} : compute_geometry(s.g);
  const StateGeometry& geo = precomputed ? *precomputed : owned;
  const Rank3Field gradk = covariant_derivative_sym(s.k, geo.gamma);

  MonitorReport r;
  r.tau = s.tau;

  // gauge residual, restricted to the reduction region
  {
    double worst = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      if (!mask.inside(p)) continue;
      const double v = std::abs(s.n[p] - s.f[p] * std::sqrt(geo.mp.det[p])) / s.n[p];
      if (v > worst) worst = v;
    }
    r.gauge_residual = worst;
  }

  // constraints
  {
    const ScalarField ham = hamiltonian_with(s, geo);
    const Vec3Field mom = momentum_with(s, geo, gradk);
    const double h3 = grid.cell_volume();
    double ham_sup = 0.0, ham_l2 = 0.0, mom_sup2 = 0.0, mom_l22 = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      if (!mask.inside(p)) continue;
      const double w = std::sqrt(geo.mp.det[p]) * h3;
      const double ha = std::abs(ham[p]);
      if (ha > ham_sup) ham_sup = ha;
      ham_l2 += ham[p] * ham[p] * w;
      const Sym3 gi = load_sym3(geo.mp.inverse, p);
      const double m2 = norm2_cov_vector(
          {mom.plane(0)[p], mom.plane(1)[p], mom.plane(2)[p]}, gi);
      if (m2 > mom_sup2) mom_sup2 = m2;
      mom_l22 += m2 * w;
    }
    r.ham_sup = ham_sup;
    r.ham_l2 = std::sqrt(ham_l2);
    r.mom_sup = std::sqrt(mom_sup2);
    r.mom_l2 = std::sqrt(mom_l22);
  }

  // breakdown quantities, coordinate speed, Gronwall drift
  {
    ScalarField dn[3];
    for (int a = 0; a < 3; ++a) dn[a] = fd_derivative(s.n, a);
    double sup_raw = 0.0, n_sup = 0.0, vmax = 0.0, drift = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      if (!mask.inside(p)) continue;
      const Sym3 gp = load_sym3(s.g, p);
      const Sym3 gi = load_sym3(geo.mp.inverse, p);
      const Sym3 kp = load_sym3(s.k, p);
      const double inv_n = 1.0 / s.n[p];
      const double knorm = std::sqrt(norm2_sym_cov(kp, gi));
      const double gradlogn = std::sqrt(norm2_cov_vector(
          {dn[0][p] * inv_n, dn[1][p] * inv_n, dn[2][p] * inv_n}, gi));
      const double raw = knorm + gradlogn;
      if (raw > sup_raw) sup_raw = raw;
      if (s.n[p] > n_sup) n_sup = s.n[p];
      const auto eig = sym3_eigenvalues(gp);
      const double v = s.n[p] / std::sqrt(eig[0]);
      if (v > vmax) vmax = v;
      const double d = 2.0 * s.n[p] * op_norm_wrt(kp, gp);
      if (d > drift) drift = d;
    }
    r.breakdown_sup_raw = sup_raw;
    r.breakdown_pointwise = 2.0 * sup_raw;  // deformation proxy |pi|
    r.n_domain_sup = n_sup;
    r.vmax = vmax;
    r.spectrum_drift_rate = drift;
  }

  // curvature and spectrum
  {
    const ElectricMagnetic eb = electric_magnetic_with(s, geo, gradk);
    r.curvature_l2 = curvature_l2_with(s, geo, eb, mask);
    const auto [lo, hi] = spectrum_monitor(s, mask);
    r.spectrum_min = lo;
    r.spectrum_max = hi;
  }

  if (du_k != nullptr) {
    r.wave_energy = wave_energy_with(s.k, du_k->dk, s, geo, gradk, mask);
  }

  // lapse at the proper-time probe point (nearest grid point)
  {
    const double h = grid.spacing();
    const int n = grid.npts();
    auto snap = [&](double c) {
      int i = static_cast<int>(std::llround(c / h)) % n;
      if (i < 0) i += n;
      return i;
    };
    r.n_center = s.n[grid.index(snap(proper_time_probe[0]), snap(proper_time_probe[1]),
                                snap(proper_time_probe[2]))];
  }

  return r;
}

}  // namespace evth
