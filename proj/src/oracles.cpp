#include "evth/oracles.hpp"

#include <cmath>
#include <numbers>

namespace evth {

namespace {
constexpr double kKasnerTol = 1e-12;
}

KasnerParams::KasnerParams(double p1_, double p2_, double p3_, double f_)
    : p1(p1_), p2(p2_), p3(p3_), f(f_) {
  const double lin = p1 + p2 + p3 - 1.0;
  const double quad = p1 * p1 + p2 * p2 + p3 * p3 - 1.0;
  if (std::abs(lin) > kKasnerTol)
    throw ConfigError("Kasner exponents violate p1+p2+p3=1 by " + std::to_string(lin));
  if (std::abs(quad) > kKasnerTol)
    throw ConfigError("Kasner exponents violate p1^2+p2^2+p3^2=1 by " +
                      std::to_string(quad));
  if (!(f > 0.0)) throw ConfigError("Kasner gauge density f must be positive");
}

KasnerParams KasnerParams::from_two(double p1, double p2, double f) {
  return KasnerParams(p1, p2, 1.0 - p1 - p2, f);
}

SliceState kasner_state(const KasnerParams& kp, double tau, const GridSpec& grid) {
  SliceState s;
  s.g = SymTensorField(grid);
  s.k = SymTensorField(grid);
  s.n = ScalarField(grid, kp.f * std::exp(kp.f * tau));
  s.f = ScalarField(grid, kp.f);
  s.tau = tau;

  const auto p = kp.exponents();
  const int diag[3] = {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ};
  const std::size_t np = grid.size();
  for (int a = 0; a < 3; ++a) {
    const double gv = std::exp(2.0 * p[a] * kp.f * tau);
    const double kv = -p[a] * std::exp((2.0 * p[a] - 1.0) * kp.f * tau);
    double* gp = s.g.plane(diag[a]);
    double* kpp = s.k.plane(diag[a]);
    for (std::size_t q = 0; q < np; ++q) {
      gp[q] = gv;
      kpp[q] = kv;
    }
  }
  return s;
}

SliceState flat_state(const GridSpec& grid) {
  SliceState s;
  s.g = SymTensorField(grid);
  s.k = SymTensorField(grid);
  s.n = ScalarField(grid, 1.0);
  s.f = ScalarField(grid, 1.0);
  s.tau = 0.0;
  const std::size_t np = grid.size();
  for (int d : {SymTensorField::XX, SymTensorField::YY, SymTensorField::ZZ}) {
    double* gp = s.g.plane(d);
    for (std::size_t q = 0; q < np; ++q) gp[q] = 1.0;
  }
  return s;
}

SliceState perturbed_flat(const GridSpec& grid, double amplitude,
                          const std::array<int, 3>& wavevector) {
  if (std::abs(amplitude) > 1e-3) throw AmplitudeTooLargeError(amplitude);
  if (wavevector[0] == 0 && wavevector[1] == 0 && wavevector[2] == 0)
    throw ConfigError("perturbed_flat needs a nonzero wavevector");

  // Traceless-transverse polarization for m: with u, v unit vectors
  // orthogonal to m and each other, e = u (x) u - v (x) v.
  const double mx = wavevector[0], my = wavevector[1], mz = wavevector[2];
  const double mnorm = std::sqrt(mx * mx + my * my + mz * mz);
  const std::array<double, 3> mhat = {mx / mnorm, my / mnorm, mz / mnorm};
  // Pick the coordinate axis least aligned with m to seed the frame.
  std::array<double, 3> seed = {1.0, 0.0, 0.0};
  if (std::abs(mhat[0]) >= std::abs(mhat[1]) && std::abs(mhat[0]) >= std::abs(mhat[2]))
    seed = {0.0, 1.0, 0.0};
  std::array<double, 3> u, v;
  {
    const double dot = seed[0] * mhat[0] + seed[1] * mhat[1] + seed[2] * mhat[2];
    for (int a = 0; a < 3; ++a) u[a] = seed[a] - dot * mhat[a];
    const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (int a = 0; a < 3; ++a) u[a] /= un;
    v = {mhat[1] * u[2] - mhat[2] * u[1], mhat[2] * u[0] - mhat[0] * u[2],
         mhat[0] * u[1] - mhat[1] * u[0]};
  }
  Sym3 pol;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
      pol.comp(SymTensorField::sym_index(a, b)) = u[a] * u[b] - v[a] * v[b];

  SliceState s = flat_state(grid);
  const double two_pi_over_l = 2.0 * std::numbers::pi / grid.period();
  const int n = grid.npts();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double phase =
            two_pi_over_l * (wavevector[0] * grid.coord(i) +
                             wavevector[1] * grid.coord(j) +
                             wavevector[2] * grid.coord(k));
        const double w = amplitude * std::sin(phase);
        const std::size_t p = grid.index(i, j, k);
        for (int c = 0; c < 6; ++c) s.g.plane(c)[p] += w * pol.comp(c);
      }
  return init_gauge(s.g, s.k, s.n);
}

}  // namespace evth
