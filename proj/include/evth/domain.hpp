#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "evth/state.hpp"

namespace evth {

/// Coordinate ball realizing the localized region: the radius is shrunk at
/// the coordinate causal speed each step, so fields inside the ball at time
/// tau depend only on initial data inside the starting ball.
struct DomainSpec {
  std::array<double, 3> center = {0.0, 0.0, 0.0};
  double radius = 0.0;
  double speed_integral = 0.0;  // accumulated int v_max dtau
};

/// Membership flags for a reduction region (a domain ball, or the whole grid).
class DomainMask {
 public:
  static DomainMask full(const GridSpec& grid);
  static DomainMask ball(const GridSpec& grid, const DomainSpec& d);

  bool inside(std::size_t p) const { return inside_[p] != 0; }
  std::size_t count() const { return count_; }
  const std::vector<std::uint8_t>& flags() const { return inside_; }

 private:
  std::vector<std::uint8_t> inside_;
  std::size_t count_ = 0;
};

/// sup over the mask of n sqrt(max eig g^{-1}) — the coordinate light speed.
double coordinate_speed_sup(const SliceState& s, const DomainMask& mask);

/// Shrink the ball by v_max * |dt| plus `halo_spacings` grid spacings (the
/// stencil-halo margin, applied once per batch of steps by the caller).
/// Throws DomainCrushedError when the radius reaches zero or the ball no
/// longer contains a grid point.
DomainSpec shrink_domain(const DomainSpec& d, const SliceState& s, double dt,
                         int halo_spacings = 0);

}  // namespace evth
