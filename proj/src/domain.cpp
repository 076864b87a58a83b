#include "evth/domain.hpp"

#include <cmath>

namespace evth {

DomainMask DomainMask::full(const GridSpec& grid) {
  DomainMask m;
  m.inside_.assign(grid.size(), 1);
  m.count_ = grid.size();
  return m;
}

DomainMask DomainMask::ball(const GridSpec& grid, const DomainSpec& d) {
  DomainMask m;
  m.inside_.assign(grid.size(), 0);
  const int n = grid.npts();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::array<double, 3> x = {grid.coord(i), grid.coord(j), grid.coord(k)};
        if (grid.distance(x, d.center) < d.radius) {
          m.inside_[grid.index(i, j, k)] = 1;
          ++m.count_;
        }
      }
  return m;
}

double coordinate_speed_sup(const SliceState& s, const DomainMask& mask) {
  const std::size_t np = s.grid().size();
  double vmax = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    if (!mask.inside(p)) continue;
    const Sym3 gp = load_sym3(s.g, p);
    const auto eig = sym3_eigenvalues(gp);
    // max eig of g^{-1} = 1 / min eig of g
    const double v = s.n[p] / std::sqrt(eig[0]);
    if (v > vmax) vmax = v;
  }
  return vmax;
}

DomainSpec shrink_domain(const DomainSpec& d, const SliceState& s, double dt,
                         int halo_spacings) {
  const DomainMask mask = DomainMask::ball(s.grid(), d);
  if (mask.count() == 0) throw DomainCrushedError();
  const double vmax = coordinate_speed_sup(s, mask);
  const double travel = vmax * std::abs(dt);
  DomainSpec out = d;
  out.radius = d.radius - travel - halo_spacings * s.grid().spacing();
  out.speed_integral = d.speed_integral + travel;
  if (!(out.radius > 0.0)) {
    throw DomainCrushedError();
  }
  if (DomainMask::ball(s.grid(), out).count() == 0) throw DomainCrushedError();
  return out;
}

}  // namespace evth
