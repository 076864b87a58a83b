#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "evth/calculus.hpp"
#include "evth/grid.hpp"

namespace evth {

/// Single-source geodesic distances on the grid graph of primitive offsets
/// within the radius-2 box (the 26-neighborhood plus the (2,1,0) direction
/// classes, 98 edges per node); edge length is the metric length of the
/// straight segment with the midpoint metric (mean of the endpoint metrics).
/// The source is the grid point nearest to p. The flat-metric metrication
/// error is below 5 percent in every direction.
ScalarField geodesic_distances(const SymTensorField& g, const std::array<double, 3>& p);

struct RadiusReport {
  std::array<double, 3> point = {0.0, 0.0, 0.0};
  double volume_radius_ratio = 0.0;  // min over reliable scales of vol B(p,s)/s^3
  double chart_radius = 0.0;
  std::vector<double> scales_tested;
  std::vector<double> ratios;           // per scale
  std::vector<std::uint8_t> reliable;   // per scale: s >= 2h
};

/// vol B(p,s) = sum_{dist < s} sqrt(det g) h^3 per scale. Scales below 2h are
/// flagged unreliable (single-cell dominated) and excluded from the reported
/// minimum; scales above period/4 raise ScaleTooLargeError (ball would wrap).
RadiusReport volume_radius(const SymTensorField& g, const std::array<double, 3>& p,
                           std::span<const double> scales);

/// Largest r <= max_r such that on the geodesic ball B(p,r) the chart metric
/// spectrum stays in [1/2, 2] and r^{|j|-3/2} ||d^j g||_{L2(B)} <= 2 for every
/// multiindex with 1 <= |j| <= 2+l (l in {0,1}); bisection to tolerance h,
/// 0 if the conditions already fail at r = 2h. The conditions are evaluated
/// in the simulation chart (harmonic-chart construction is out of scope), so
/// this is a chart-radius proxy with the same scaling behavior.
double chart_radius(const SymTensorField& g, const std::array<double, 3>& p, int l,
                    double max_r);

}  // namespace evth
