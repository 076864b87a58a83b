#include "evth/localization.hpp"

#include <cmath>

namespace evth {

CausalBallResult causal_ball_check(std::span<const MonitorReport> reports, double nu) {
  CausalBallResult res;
  bool hypotheses_hold = true;
  for (const MonitorReport& r : reports) {
    hypotheses_hold = hypotheses_hold && r.spectrum_min >= 0.25 &&
                      r.spectrum_max <= 4.0 && r.n_domain_sup <= 2.0 * nu;
    if (!hypotheses_hold) break;
    const double tau = std::abs(r.tau - reports.front().tau);
    if (tau <= 0.0) continue;
    const double bound = 20.0 * nu * tau;
    const double margin = 1.0 - r.speed_integral / bound;
    if (margin < res.worst_margin) res.worst_margin = margin;
    if (margin < 0.0) res.pass = false;
    ++res.steps_checked;
  }
  return res;
}

double temporal_extent(const SliceState& s0, const std::array<double, 3>& p, double r0,
                       const ThresholdConfig& thresholds, const EvolutionConfig& cfg) {
  if (!(r0 > 0.0)) throw ConfigError("temporal_extent needs a positive initial radius");
  MonitorConfig mon;
  mon.thresholds = thresholds;
  mon.domain = DomainSpec{p, r0, 0.0};
  mon.compute_wave_energy = false;
  const EvolveResult res = evolve(s0, cfg, mon);
  return res.reports.empty() ? 0.0 : res.reports.back().proper_time;
}

SliceState scaled_state(const SliceState& s, double lambda) {
  SliceState out;
  out.g = s.g;
  out.k = s.k;
  out.n = s.n;
  out.f = s.f;
  out.tau = s.tau;
  const double l2 = lambda * lambda;
  for (double& v : out.g.raw()) v *= l2;
  for (double& v : out.k.raw()) v *= lambda;
  for (double& v : out.n.raw()) v *= lambda;
  for (double& v : out.f.raw()) v /= l2;  // f = n / sqrt(det g) -> lambda^{-2} f
  return out;
}

ScalingLawResult scaling_law_check(const SliceState& s0, double lambda,
                                   const std::array<double, 3>& p, double r0,
                                   const ThresholdConfig& thresholds,
                                   const EvolutionConfig& cfg) {
  if (!(lambda > 0.0)) throw ConfigError("scaling factor must be positive");
  ScalingLawResult out;
  out.extent_base = temporal_extent(s0, p, r0, thresholds, cfg);
  out.extent_scaled = temporal_extent(scaled_state(s0, lambda), p, r0,
                                      thresholds.scaled(1.0 / lambda), cfg);
  out.ratio = out.extent_scaled / out.extent_base;
  return out;
}

double extent_lower_bound(double alpha, double r_h, double t_star1) {
  if (!(alpha > 0.0) || !(r_h > 0.0) || !(t_star1 > 0.0))
    throw ConfigError("extent_lower_bound needs positive inputs");
  return std::min(t_star1, r_h * t_star1);
}

}  // namespace evth
