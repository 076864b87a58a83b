#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "evth/calculus.hpp"
#include "test_fields.hpp"

using namespace evth;
using namespace evth::testing;

namespace {

ScalarField sine_field(const GridSpec& grid, int axis) {
  ScalarField f(grid);
  const double q = 2.0 * std::numbers::pi / grid.period();
  const int n = grid.npts();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        f.at(i, j, k) = std::sin(q * grid.coord(idx[axis]));
      }
  return f;
}

double sine_derivative_error(const GridSpec& grid, int axis) {
  const ScalarField f = sine_field(grid, axis);
  const ScalarField df = fd_derivative(f, axis);
  const double q = 2.0 * std::numbers::pi / grid.period();
  double worst = 0.0;
  const int n = grid.npts();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        const double exact = q * std::cos(q * grid.coord(idx[axis]));
        worst = std::max(worst, std::abs(df.at(i, j, k) - exact));
      }
  return worst;
}

}  // namespace

TEST_CASE("fd_derivative annihilates constants exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-100.0, 100.0);
  for (int trial = 0; trial < 5; ++trial) {
    const GridSpec grid(8 + 4 * trial, 1.0 + trial);
    ScalarField f(grid, c(rng));
    for (int axis = 0; axis < 3; ++axis) {
      const ScalarField df = fd_derivative(f, axis);
      CHECK(max_abs(df.raw()) == 0.0);
    }
  }
}

TEST_CASE("fd_derivative matches the analytic sine derivative at 4th order") {
  for (int axis = 0; axis < 3; ++axis) {
    const double err32 = sine_derivative_error(GridSpec(32, 1.0), axis);
    const double err64 = sine_derivative_error(GridSpec(64, 1.0), axis);
    // leading truncation term: (h^4/30) max|f^(5)| = (2 pi)^5 / (30 * 32^4)
    const double predicted = std::pow(2.0 * std::numbers::pi, 5.0) / (30.0 * std::pow(32.0, 4.0));
    CHECK(err32 < 1.1 * predicted);
    const double ratio = err32 / err64;
    CHECK(ratio > 15.0);
    CHECK(ratio < 17.0);
  }
}

TEST_CASE("metric_pointwise on the identity metric") {
  const GridSpec grid(8, 1.0);
  SymTensorField g(grid);
  for (int d : {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ})
    for (std::size_t p = 0; p < grid.size(); ++p) g.plane(d)[p] = 1.0;
  const auto mp = metric_pointwise(g);
  CHECK(max_abs_diff(mp.inverse.raw(), g.raw()) == 0.0);
  for (std::size_t p = 0; p < grid.size(); ++p) CHECK(mp.det[p] == 1.0);
}

TEST_CASE("metric_pointwise on the Kasner tau=ln2 slice metric") {
  const GridSpec grid(8, 1.0);
  const double gx = std::pow(2.0, 4.0 / 3.0);
  const double gz = std::pow(2.0, -2.0 / 3.0);
  SymTensorField g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    g.plane(SymTensorField::XX)[p] = gx;
    g.plane(SymTensorField::YY)[p] = gx;
    g.plane(SymTensorField::ZZ)[p] = gz;
  }
  const auto mp = metric_pointwise(g);
  CHECK(mp.det[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(mp.inverse.plane(SymTensorField::XX)[0] ==
        doctest::Approx(std::pow(2.0, -4.0 / 3.0)).epsilon(1e-14));
  CHECK(mp.inverse.plane(SymTensorField::ZZ)[0] ==
        doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("metric_pointwise rejects a metric with a zero row") {
  const GridSpec grid(8, 1.0);
  SymTensorField g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    g.plane(SymTensorField::XX)[p] = 1.0;
    g.plane(SymTensorField::YY)[p] = 1.0;
    // zz row left zero
  }
  CHECK_THROWS_AS(metric_pointwise(g), NonPositiveDefiniteError);
}

TEST_CASE("metric_pointwise inverse is exact to round-off on random SPD metrics") {
  const GridSpec grid(8, 1.0);
  std::mt19937_64 rng(11);
  SymTensorField g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) store_sym3(g, p, random_spd(rng, 8.0));
  const auto mp = metric_pointwise(g);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Sym3 gp = load_sym3(g, p);
    const Sym3 gi = load_sym3(mp.inverse, p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += gp(a, c) * gi(c, b);
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("christoffel of a spatially constant metric vanishes exactly") {
  const GridSpec grid(8, 2.0);
  std::mt19937_64 rng(3);
  const Sym3 gc = random_spd(rng, 4.0);
  SymTensorField g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) store_sym3(g, p, gc);
  const Rank3Field gam = christoffel(g);
  CHECK(max_abs(gam.raw()) == 0.0);
}

TEST_CASE("christoffel of a scaled flat metric vanishes") {
  const GridSpec grid(8, 1.0);
  SymTensorField g(grid);
  for (int d : {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ})
    for (std::size_t p = 0; p < grid.size(); ++p) g.plane(d)[p] = 4.0;
  CHECK(max_abs(christoffel(g).raw()) == 0.0);
}

TEST_CASE("christoffel matches the conformal-metric closed form at 4th order") {
  auto worst_error = [](int npts) {
    const ConformalOracle oracle(GridSpec(npts, 1.0), 0.01);
    const Rank3Field gam = christoffel(oracle.g);
    const GridSpec& grid = oracle.grid;
    double worst = 0.0;
    const int n = grid.npts();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::size_t p = grid.index(i, j, k);
          for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a)
              for (int b = a; b < 3; ++b) {
                const double got =
                    gam.plane_cab(c, SymTensorField::sym_index(a, b))[p];
                const double exact = oracle.christoffel_exact(c, a, b, i);
                worst = std::max(worst, std::abs(got - exact));
              }
        }
    return worst;
  };
  const double e16 = worst_error(16);
  const double e32 = worst_error(32);
  CHECK(e32 < 1e-5);
  const double ratio = e16 / e32;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("ricci of constant metrics vanishes exactly") {
  const GridSpec grid(8, 1.0);
  SymTensorField g(grid);
  // a Kasner-type constant diagonal slice metric
  for (std::size_t p = 0; p < grid.size(); ++p) {
    g.plane(SymTensorField::XX)[p] = 2.5198420997897464;
    g.plane(SymTensorField::YY)[p] = 2.5198420997897464;
    g.plane(SymTensorField::ZZ)[p] = 0.62996052494743671;
  }
  CHECK(max_abs(ricci(g).raw()) == 0.0);
  CHECK(max_abs(scalar_curvature(g).raw()) == 0.0);
}

TEST_CASE("scalar curvature matches the conformal closed form at 4th order") {
  auto worst_error = [](int npts) {
    const ConformalOracle oracle(GridSpec(npts, 1.0), 0.01);
    const ScalarField r = scalar_curvature(oracle.g);
    double worst = 0.0;
    const int n = npts;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(r.at(i, j, k) - oracle.scalar_exact(i)));
    return worst;
  };
  const double e16 = worst_error(16);
  const double e32 = worst_error(32);
  CHECK(e32 < 2e-3);
  const double ratio = e16 / e32;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("ricci tensor matches the conformal closed form") {
  const ConformalOracle oracle(GridSpec(32, 1.0), 0.01);
  const SymTensorField ric = ricci(oracle.g);
  const GridSpec& grid = oracle.grid;
  double worst = 0.0;
  const int n = grid.npts();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t p = grid.index(i, j, k);
        for (int a = 0; a < 3; ++a)
          for (int b = a; b < 3; ++b) {
            const double got = ric.plane(SymTensorField::sym_index(a, b))[p];
            worst = std::max(worst, std::abs(got - oracle.ricci_exact(a, b, i)));
          }
      }
  CHECK(worst < 5e-4);
}

TEST_CASE("covariant_hessian edge cases and the flat sine oracle") {
  const GridSpec grid(32, 1.0);
  SymTensorField flat(grid);
  for (int d : {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ})
    for (std::size_t p = 0; p < grid.size(); ++p) flat.plane(d)[p] = 1.0;

  SUBCASE("constant scalar gives zero") {
    ScalarField s(grid, 3.25);
    CHECK(max_abs(covariant_hessian(s, flat).raw()) == 0.0);
  }
  SUBCASE("homogeneous scalar on a curved metric gives zero") {
    const ConformalOracle oracle(GridSpec(16, 1.0), 0.01);
    ScalarField s(oracle.grid, -1.5);
    CHECK(max_abs(covariant_hessian(s, oracle.g).raw()) == 0.0);
  }
  SUBCASE("flat-metric sine matches the analytic second derivative") {
    const ScalarField s = sine_field(grid, 0);
    const SymTensorField hess = covariant_hessian(s, flat);
    const double q = 2.0 * std::numbers::pi;
    double worst = 0.0;
    const int n = grid.npts();
    for (int i = 0; i < n; ++i) {
      const double exact = -q * q * std::sin(q * grid.coord(i));
      worst = std::max(worst,
                       std::abs(hess.plane(SymTensorField::XX)[grid.index(i, 0, 0)] -
                                exact));
    }
    CHECK(worst < 2e-2);  // composed stencil, |f^(6)| ~ (2 pi)^6
    for (int c : {SymTensorField::XY, SymTensorField::XZ, SymTensorField::YY,
                  SymTensorField::YZ, SymTensorField::ZZ})
      CHECK(max_abs(hess.comp(c)) < 1e-12);
  }
}

TEST_CASE("norms of the Kasner tau=0 extrinsic curvature on the unit torus") {
  const GridSpec grid(8, 1.0);
  SymTensorField g(grid), k(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    g.plane(SymTensorField::XX)[p] = 1.0;
    g.plane(SymTensorField::YY)[p] = 1.0;
    g.plane(SymTensorField::ZZ)[p] = 1.0;
    k.plane(SymTensorField::XX)[p] = -2.0 / 3.0;
    k.plane(SymTensorField::YY)[p] = -2.0 / 3.0;
    k.plane(SymTensorField::ZZ)[p] = 1.0 / 3.0;
  }
  const NormPair np = norms(k, g, true);
  CHECK(np.sup == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(np.l2 == doctest::Approx(1.0).epsilon(1e-14));

  SUBCASE("zero field gives (0, 0)") {
    SymTensorField z(grid);
    const NormPair zp = norms(z, g, true);
    CHECK(zp.sup == 0.0);
    CHECK(zp.l2 == 0.0);
  }

  SUBCASE("covariant 2-tensor norm scales as 1/lambda^2 under g -> lambda^2 g") {
    SymTensorField g4(grid);
    for (std::size_t p = 0; p < grid.size(); ++p)
      store_sym3(g4, p, load_sym3(g, p).scaled(4.0));
    const NormPair scaled = norms(k, g4, false);
    const NormPair base = norms(k, g, false);
    CHECK(scaled.sup == doctest::Approx(base.sup / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("grid calculus operations are pure (bit-identical reruns)") {
  const ConformalOracle oracle(GridSpec(12, 1.0), 0.005);
  const SymTensorField r1 = ricci(oracle.g);
  const SymTensorField r2 = ricci(oracle.g);
  CHECK(std::memcmp(r1.raw().data(), r2.raw().data(),
                    r1.raw().size() * sizeof(double)) == 0);
}
