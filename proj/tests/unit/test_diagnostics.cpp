#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "evth/evolution.hpp"
#include "evth/oracles.hpp"
#include "test_fields.hpp"

using namespace evth;
using namespace evth::testing;

namespace {

const double kLn2 = std::log(2.0);

SliceState conformal_state(const ConformalOracle& oracle) {
  SymTensorField k(oracle.grid);
  ScalarField n(oracle.grid, 1.0);
  return init_gauge(oracle.g, k, n);
}

}  // namespace

TEST_CASE("hamiltonian_residual") {
  SUBCASE("flat state: exactly zero") {
    CHECK(max_abs(hamiltonian_residual(flat_state(GridSpec(8, 1.0))).raw()) == 0.0);
  }
  SUBCASE("Kasner at several times: homogeneous cancellation to 1e-12") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    for (double tau : {-0.7, 0.3, 1.5}) {
      const SliceState s = kasner_state(kp, tau, GridSpec(8, 1.0));
      CHECK(max_abs(hamiltonian_residual(s).raw()) <= 1e-12);
    }
  }
  SUBCASE("conformally flat data with k = 0: H equals the scalar curvature") {
    const ConformalOracle oracle(GridSpec(32, 1.0), 0.01);
    const SliceState s = conformal_state(oracle);
    const ScalarField h = hamiltonian_residual(s);
    double worst = 0.0;
    const int n = oracle.grid.npts();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(h.at(i, j, k) - oracle.scalar_exact(i)));
    CHECK(worst < 2e-3);
  }
}

TEST_CASE("momentum_residual") {
  const GridSpec grid(32, 1.0);
  SUBCASE("k = 0 gives zero") {
    CHECK(max_abs(momentum_residual(flat_state(grid)).raw()) == 0.0);
  }
  SUBCASE("homogeneous k gives zero to round-off") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    const SliceState s = kasner_state(kp, 0.4, GridSpec(8, 1.0));
    CHECK(max_abs(momentum_residual(s).raw()) <= 1e-13);
  }
  SUBCASE("symmetric-gradient k on the flat metric matches the divergence oracle") {
    // k_ij = d_i w_j + d_j w_i with w = a sin(2 pi m.x / L):
    // M_i = lap w_i - d_i div w = -(2 pi/L)^2 (|m|^2 a_i - (a.m) m_i) sin(...)
    SliceState s = flat_state(grid);
    const std::array<double, 3> a = {0.3, -0.7, 0.2};
    const std::array<int, 3> m = {1, 2, 0};
    const double q = 2.0 * std::numbers::pi / grid.period();
    const int n = grid.npts();
    for (int kk = 0; kk < n; ++kk)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double phase =
              q * (m[0] * grid.coord(i) + m[1] * grid.coord(j) + m[2] * grid.coord(kk));
          const double dw[3] = {q * m[0] * std::cos(phase), q * m[1] * std::cos(phase),
                                q * m[2] * std::cos(phase)};
          const std::size_t p = grid.index(i, j, kk);
          for (int x = 0; x < 3; ++x)
            for (int y = x; y < 3; ++y)
              s.k.plane(SymTensorField::sym_index(x, y))[p] =
                  a[y] * dw[x] + a[x] * dw[y];
        }
    const Vec3Field mom = momentum_residual(s);
    const double m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    const double am = a[0] * m[0] + a[1] * m[1] + a[2] * m[2];
    double worst = 0.0;
    for (int kk = 0; kk < n; ++kk)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double phase =
              q * (m[0] * grid.coord(i) + m[1] * grid.coord(j) + m[2] * grid.coord(kk));
          const std::size_t p = grid.index(i, j, kk);
          for (int x = 0; x < 3; ++x) {
            const double exact = -q * q * (m2 * a[x] - am * m[x]) * std::sin(phase);
            worst = std::max(worst, std::abs(mom.plane(x)[p] - exact));
          }
        }
    CHECK(worst < 6e-2);  // truncation of the wavenumber-sqrt(5) mode at 32^3
  }
}

TEST_CASE("electric_magnetic") {
  const GridSpec grid(8, 1.0);
  SUBCASE("flat state: E = B = 0 exactly") {
    const ElectricMagnetic eb = electric_magnetic(flat_state(grid));
    CHECK(max_abs(eb.electric.raw()) == 0.0);
    CHECK(max_abs(eb.magnetic.raw()) == 0.0);
  }
  SUBCASE("Kasner: E_ii = p_i(1-p_i) exp((2p_i-2) f tau), B = 0") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    for (double tau : {0.0, 0.9}) {
      const SliceState s = kasner_state(kp, tau, grid);
      const ElectricMagnetic eb = electric_magnetic(s);
      const auto p = kp.exponents();
      const int diag[3] = {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ};
      for (int a = 0; a < 3; ++a) {
        const double exact =
            p[a] * (1.0 - p[a]) * std::exp((2.0 * p[a] - 2.0) * kp.f * tau);
        CHECK(eb.electric.plane(diag[a])[0] == doctest::Approx(exact).epsilon(1e-12));
      }
      CHECK(max_abs(eb.magnetic.raw()) <= 1e-13);
    }
  }
  SUBCASE("cross-operation identity E = (dk + hess n)/n + k.k, pointwise") {
    // exact identity of the discrete operators, also on inhomogeneous data
    const SliceState s = perturbed_flat(GridSpec(16, 1.0), 1e-4, {1, 1, 0});
    const ElectricMagnetic eb = electric_magnetic(s);
    const StateDerivative d = rhs(s);
    const auto mp = metric_pointwise(s.g);
    const Rank3Field gamma = christoffel(s.g, mp.inverse);
    const SymTensorField hess = covariant_hessian(s.n, gamma);
    double worst = 0.0;
    for (std::size_t p = 0; p < s.grid().size(); ++p) {
      const Sym3 gi = load_sym3(mp.inverse, p);
      const Sym3 kp = load_sym3(s.k, p);
      const Sym3 expected = load_sym3(d.dk, p)
                                .plus(load_sym3(hess, p))
                                .scaled(1.0 / s.n[p])
                                .plus(mixed_square(kp, gi));
      const Sym3 got = load_sym3(eb.electric, p);
      for (int c = 0; c < 6; ++c)
        worst = std::max(worst, std::abs(got.comp(c) - expected.comp(c)));
    }
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("curvature_l2") {
  const GridSpec grid(16, 1.0);
  SUBCASE("flat: zero") {
    const SliceState s = flat_state(grid);
    CHECK(curvature_l2(s, DomainMask::full(grid)) == 0.0);
  }
  SUBCASE("Kasner over the full torus equals vol * |E|^2") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    const SliceState s = kasner_state(kp, 0.0, grid);
    // |E|^2 at tau=0: sum p_i^2 (1-p_i)^2 = (2/9)^2 + (2/9)^2 + (4/9)^2 = 24/81
    const double expected = 24.0 / 81.0;  // volume 1, det g = 1
    CHECK(curvature_l2(s, DomainMask::full(grid)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("halving the ball radius scales by the discrete ball-volume ratio") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    const SliceState s = kasner_state(kp, 0.0, grid);
    const DomainSpec big{{0.5, 0.5, 0.5}, 0.4, 0.0};
    const DomainSpec small{{0.5, 0.5, 0.5}, 0.2, 0.0};
    const DomainMask mb = DomainMask::ball(grid, big);
    const DomainMask ms = DomainMask::ball(grid, small);
    const double cb = curvature_l2(s, mb);
    const double cs = curvature_l2(s, ms);
    CHECK(cs / cb == doctest::Approx(static_cast<double>(ms.count()) / mb.count())
                         .epsilon(1e-12));
  }
}

TEST_CASE("spectrum_monitor") {
  const GridSpec grid(8, 1.0);
  const DomainMask full = DomainMask::full(grid);
  SUBCASE("flat: (1, 1)") {
    const auto [lo, hi] = spectrum_monitor(flat_state(grid), full);
    CHECK(lo == 1.0);
    CHECK(hi == 1.0);
  }
  SUBCASE("Kasner tau = ln 2: (2^{-2/3}, 2^{4/3})") {
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    const auto [lo, hi] = spectrum_monitor(kasner_state(kp, kLn2, grid), full);
    CHECK(lo == doctest::Approx(0.629961).epsilon(1e-6));
    CHECK(hi == doctest::Approx(2.519842).epsilon(1e-6));
  }
  SUBCASE("g = 4 delta: (4, 4)") {
    SliceState s = flat_state(grid);
    for (double& v : s.g.raw()) v *= 4.0;
    const auto [lo, hi] = spectrum_monitor(s, full);
    CHECK(lo == 4.0);
    CHECK(hi == 4.0);
  }
}

TEST_CASE("breakdown monitors on the Kasner family") {
  const GridSpec grid(8, 1.0);
  const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
  const DomainMask full = DomainMask::full(grid);

  SUBCASE("flat: monitor zero") {
    const MonitorReport r =
        compute_monitor_report(flat_state(grid), nullptr, full, {0, 0, 0});
    CHECK(r.breakdown_sup_raw == 0.0);
    CHECK(r.breakdown_pointwise == 0.0);
  }
  SUBCASE("at tau = -ln 2 the raw monitor is |k| = 2, the proxy is 4") {
    const SliceState s = kasner_state(kp, -kLn2, grid);
    const MonitorReport r = compute_monitor_report(s, nullptr, full, {0, 0, 0});
    CHECK(r.breakdown_sup_raw == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.breakdown_pointwise == doctest::Approx(4.0).epsilon(1e-9));
  }
  SUBCASE("forward accumulators over [0,1]: 1 - 1/e and 2(1 - 1/e)") {
    EvolutionConfig cfg;
    cfg.tau_end = 1.0;
    MonitorConfig mon;
    const EvolveResult res = evolve(kasner_state(kp, 0.0, grid), cfg, mon);
    REQUIRE(res.reason == Termination::TauEnd);
    const double exact = 1.0 - std::exp(-1.0);
    CHECK(std::abs(res.reports.back().breakdown_integral_accum - exact) < 1e-4);
    CHECK(std::abs(res.reports.back().pi_l1linf_accum - 2.0 * exact) < 2e-4);
  }
}

TEST_CASE("breakdown pointwise monitor is invariant under axis relabeling") {
  const GridSpec grid(8, 1.0);
  std::mt19937_64 rng(23);
  SymTensorField g(grid), k(grid);
  ScalarField n(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    store_sym3(g, p, random_spd(rng, 4.0));
    store_sym3(k, p, random_sym(rng, 1.0));
    n[p] = 0.5 + 0.1 * static_cast<double>(p % 7);
  }
  const SliceState s = init_gauge(g, k, n);

  // relabel axes (x,y,z) -> (y,z,x) on all fields
  auto permuted = [&](const SliceState& in) {
    SliceState out = in;
    const int perm[3] = {1, 2, 0};
    const int nn = grid.npts();
    for (int kk = 0; kk < nn; ++kk)
      for (int j = 0; j < nn; ++j)
        for (int i = 0; i < nn; ++i) {
          const int src_idx[3] = {i, j, kk};
          const std::size_t dst =
              grid.index(src_idx[perm[0]], src_idx[perm[1]], src_idx[perm[2]]);
          const std::size_t src = grid.index(i, j, kk);
          for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
              out.g.plane(SymTensorField::sym_index(a, b))[dst] =
                  in.g.plane(SymTensorField::sym_index(perm[a], perm[b]))[src];
              out.k.plane(SymTensorField::sym_index(a, b))[dst] =
                  in.k.plane(SymTensorField::sym_index(perm[a], perm[b]))[src];
            }
          out.n.data()[dst] = in.n.data()[src];
          out.f.data()[dst] = in.f.data()[src];
        }
    return out;
  };
  const DomainMask full = DomainMask::full(grid);
  const MonitorReport r1 = compute_monitor_report(s, nullptr, full, {0, 0, 0});
  const MonitorReport r2 = compute_monitor_report(permuted(s), nullptr, full, {0, 0, 0});
  CHECK(r1.breakdown_pointwise == doctest::Approx(r2.breakdown_pointwise).epsilon(1e-12));
}

TEST_CASE("pointwise monitor scales as 1/lambda under (g,k,n) -> (l^2 g, l k, l n)") {
  const GridSpec grid(8, 1.0);
  std::mt19937_64 rng(29);
  SymTensorField g(grid), k(grid);
  ScalarField n(grid, 1.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    store_sym3(g, p, random_spd(rng, 3.0));
    store_sym3(k, p, random_sym(rng, 1.0));
  }
  SliceState s = init_gauge(g, k, n);
  SliceState scaled = s;
  const double lambda = 2.0;
  for (double& v : scaled.g.raw()) v *= lambda * lambda;
  for (double& v : scaled.k.raw()) v *= lambda;
  for (double& v : scaled.n.raw()) v *= lambda;
  for (double& v : scaled.f.raw()) v /= lambda * lambda;
  const DomainMask full = DomainMask::full(grid);
  const MonitorReport r1 = compute_monitor_report(s, nullptr, full, {0, 0, 0});
  const MonitorReport r2 = compute_monitor_report(scaled, nullptr, full, {0, 0, 0});
  CHECK(r2.breakdown_pointwise ==
        doctest::Approx(r1.breakdown_pointwise / lambda).epsilon(1e-12));
}

TEST_CASE("quasi_isometry_bound") {
  SUBCASE("zero drift leaves C' = C") {
    CHECK(quasi_isometry_bound(2.0, 0.0) == 2.0);
  }
  SUBCASE("doubling a constant-rate interval squares the exponential factor") {
    std::vector<MonitorReport> once(11), twice(21);
    for (int i = 0; i <= 20; ++i) {
      MonitorReport r;
      r.dt = 0.1;
      r.spectrum_drift_rate = 0.7;
      if (i <= 10) once[i] = r;
      twice[i] = r;
    }
    once[0].dt = twice[0].dt = 0.0;
    const double e1 = gronwall_exponent(once);
    const double e2 = gronwall_exponent(twice);
    CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
    const double c1 = quasi_isometry_bound(1.5, e1);
    const double c2 = quasi_isometry_bound(1.5, e2);
    CHECK(c2 / 1.5 == doctest::Approx((c1 / 1.5) * (c1 / 1.5)).epsilon(1e-12));
  }
  SUBCASE("the Gronwall containment holds, tightly, along a Kasner run") {
    const GridSpec grid(8, 1.0);
    const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);
    EvolutionConfig cfg;
    cfg.tau_end = kLn2;
    MonitorConfig mon;
    mon.thresholds.spectrum_bound = 4.0;  // roomy enough not to fire
    const EvolveResult res = evolve(kasner_state(kp, 0.0, grid), cfg, mon);
    REQUIRE(res.reason == Termination::TauEnd);
    CHECK(res.gronwall_ok);
    // With the smallest legitimate initial constant (spectrum starts at 1)
    // the fast eigenvalue e^{4 tau/3} saturates C' = C exp(int 2 sup n|k|_op)
    // exactly: the containment is tight, not just true.
    const double c_init = 1.0 + 1e-12;
    double worst = std::numeric_limits<double>::infinity();
    for (const MonitorReport& r : res.reports) {
      const double cprime = quasi_isometry_bound(c_init, r.gronwall_exponent);
      CHECK(r.spectrum_min * cprime >= 1.0 / (1.0 + 1e-6));
      CHECK(cprime / r.spectrum_max >= 1.0 / (1.0 + 1e-6));
      worst = std::min(worst, cprime / r.spectrum_max);
    }
    CHECK(worst < 1.0 + 1e-6);  // saturation
  }
}

TEST_CASE("wave_energy") {
  const GridSpec grid(32, 1.0);
  const SliceState flat = flat_state(grid);
  const DomainMask full = DomainMask::full(grid);

  SUBCASE("zero fields give zero") {
    SymTensorField u(grid), du(grid);
    CHECK(wave_energy(u, du, flat, full) == 0.0);
  }
  SUBCASE("homogeneous u with du = 0 gives zero") {
    SymTensorField u(grid), du(grid);
    for (std::size_t p = 0; p < grid.size(); ++p)
      store_sym3(u, p, {1.0, 0.5, -0.25, 2.0, 0.0, 3.0});
    CHECK(wave_energy(u, du, flat, full) == 0.0);
  }
  SUBCASE("flat-background sine matches the analytic quadrature") {
    // u = A sin(2 pi x / L) T, du = 0: energy = 1/2 A^2 (2 pi/L)^2 (vol/2) |T|^2
    const double amp = 0.3;
    const Sym3 dir = {1.0, 0.0, 0.0, -1.0, 0.0, 0.5};
    SymTensorField u(grid), du(grid);
    const double q = 2.0 * std::numbers::pi / grid.period();
    const int n = grid.npts();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          store_sym3(u, grid.index(i, j, k),
                     dir.scaled(amp * std::sin(q * grid.coord(i))));
    const double dir2 = norm2_sym_cov(dir, Sym3::identity());
    const double expected = 0.5 * amp * amp * q * q * 0.5 * dir2;  // vol = 1
    // the discrete gradient carries the modified wavenumber, a relative
    // deficit of 2 (qh)^4 / 30 ~ 1e-4 at 32^3
    CHECK(wave_energy(u, du, flat, full) == doctest::Approx(expected).epsilon(2e-4));
    const double e32 = std::abs(wave_energy(u, du, flat, full) - expected);
    // refinement check: 4th-order convergence of the energy quadrature
    const GridSpec fine(64, 1.0);
    const SliceState flat64 = flat_state(fine);
    SymTensorField u64(fine), du64(fine);
    for (int k = 0; k < 64; ++k)
      for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
          store_sym3(u64, fine.index(i, j, k),
                     dir.scaled(amp * std::sin(q * fine.coord(i))));
    const double e64 =
        std::abs(wave_energy(u64, du64, flat64, DomainMask::full(fine)) - expected);
    CHECK(e32 / e64 > 12.0);
    CHECK(e32 / e64 < 20.0);
  }
}

TEST_CASE("the evolved lapse satisfies the second-order wave identity") {
  // d^2 n / dtau^2 = 2 n^3 (tr k)^2 - n^3 |k|^2 + n^2 lap_g n, checked with
  // centered differences across slices (a derived diagnostic).
  const GridSpec grid(8, 1.0);
  const auto kp = KasnerParams::from_two(2.0 / 3.0, 2.0 / 3.0, 1.0);

  SUBCASE("against oracle slices (homogeneous, lap n = 0)") {
    auto residual = [&](double dtau) {
      const double tau = 0.3;
      const SliceState lo = kasner_state(kp, tau - dtau, grid);
      const SliceState mid = kasner_state(kp, tau, grid);
      const SliceState hi = kasner_state(kp, tau + dtau, grid);
      const double d2n = (hi.n[0] - 2.0 * mid.n[0] + lo.n[0]) / (dtau * dtau);
      const auto mp = metric_pointwise(mid.g);
      const Sym3 gi = load_sym3(mp.inverse, 0);
      const Sym3 kk = load_sym3(mid.k, 0);
      const double trk = trace_with_inverse(kk, gi);
      const double k2 = norm2_sym_cov(kk, gi);
      const double n = mid.n[0];
      return std::abs(d2n - (2.0 * n * n * n * trk * trk - n * n * n * k2));
    };
    const double e1 = residual(1e-2);
    const double e2 = residual(5e-3);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  SUBCASE("against consecutive evolved slices of a perturbed run") {
    const SliceState s0 = perturbed_flat(GridSpec(16, 1.0), 1e-4, {1, 0, 0});
    const double dt = 0.004;
    const SliceState s1 = step_rk4(s0, dt);
    const SliceState s2 = step_rk4(s1, dt);
    const auto mp = metric_pointwise(s1.g);
    const Rank3Field gamma = christoffel(s1.g, mp.inverse);
    const SymTensorField hess = covariant_hessian(s1.n, gamma);
    double worst = 0.0;
    for (std::size_t p = 0; p < s1.grid().size(); ++p) {
      const double d2n = (s2.n[p] - 2.0 * s1.n[p] + s0.n[p]) / (dt * dt);
      const Sym3 gi = load_sym3(mp.inverse, p);
      const Sym3 kk = load_sym3(s1.k, p);
      const double trk = trace_with_inverse(kk, gi);
      const double k2 = norm2_sym_cov(kk, gi);
      const double lap = trace_with_inverse(load_sym3(hess, p), gi);
      const double n = s1.n[p];
      const double expected =
          2.0 * n * n * n * trk * trk - n * n * n * k2 + n * n * lap;
      worst = std::max(worst, std::abs(d2n - expected));
    }
    CHECK(worst < 1e-5);
  }
}
