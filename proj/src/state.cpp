#include "evth/state.hpp"

#include <cmath>

namespace evth {

SliceState init_gauge(const SymTensorField& g0, const SymTensorField& k0,
                      const ScalarField& n0) {
  const GridSpec& grid = g0.grid();
  const auto mp = metric_pointwise(g0);  // throws on non-SPD metric
  SliceState s{g0, k0, n0, ScalarField(grid), 0.0};
  const std::size_t np = grid.size();
  for (std::size_t p = 0; p < np; ++p) {
    if (!(n0[p] > 0.0)) throw NonPositiveLapseError(p);
    s.f[p] = n0[p] / std::sqrt(mp.det[p]);
  }
  return s;
}

double gauge_residual(const SliceState& s) {
  const auto mp = metric_pointwise(s.g);
  const std::size_t np = s.grid().size();
  double worst = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const double r = std::abs(s.n[p] - s.f[p] * std::sqrt(mp.det[p])) / s.n[p];
    if (r > worst) worst = r;
  }
  return worst;
}

SymTensorField p_variable(const SliceState& s) {
  const auto mp = metric_pointwise(s.g);
  const std::size_t np = s.grid().size();
  SymTensorField out(s.grid());
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = load_sym3(mp.inverse, p);
    const Sym3 kp = load_sym3(s.k, p);
    const double trk = trace_with_inverse(kp, gi);
    const Sym3 kup = raise_both(kp, gi);
    store_sym3(out, p, kup.plus(gi.scaled(-trk)));
  }
  return out;
}

ScalarField deformation_norm(const SliceState& s) {
  const GridSpec& grid = s.grid();
  const auto mp = metric_pointwise(s.g);
  ScalarField dlogn[3];
  for (int a = 0; a < 3; ++a) {
    dlogn[a] = fd_derivative(s.n, a);
    const std::size_t np = grid.size();
    for (std::size_t p = 0; p < np; ++p) dlogn[a][p] /= s.n[p];
  }
  ScalarField out(grid);
  const std::size_t np = grid.size();
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = load_sym3(mp.inverse, p);
    const double knorm = std::sqrt(norm2_sym_cov(load_sym3(s.k, p), gi));
    const double gnorm = std::sqrt(
        norm2_cov_vector({dlogn[0][p], dlogn[1][p], dlogn[2][p]}, gi));
    out[p] = 2.0 * knorm + 2.0 * gnorm;
  }
  return out;
}

}  // namespace evth
