#pragma once

#include <span>

#include "evth/evolution.hpp"

namespace evth {

struct CausalBallResult {
  bool pass = true;
  double worst_margin = 1.0;  // min over steps of 1 - speed_integral/(20 nu tau)
  long steps_checked = 0;
};

/// Checks the causal containment bound speed_integral(tau) <= 20 nu tau on
/// every step whose prefix satisfied the stated hypotheses (metric spectrum
/// in [1/4, 4] and lapse <= 2 nu). A failed check is a returned
/// falsification, not an error.
CausalBallResult causal_ball_check(std::span<const MonitorReport> reports, double nu);

/// Evolve with a ball of radius r0 at p until a monitor fires, the domain
/// crushes, or tau_end; returns the proper time accumulated along the central
/// integral curve (0 if the thresholds are already violated at tau = 0).
double temporal_extent(const SliceState& s0, const std::array<double, 3>& p, double r0,
                       const ThresholdConfig& thresholds, const EvolutionConfig& cfg);

/// The scaled initial data (lambda^2 g, lambda k, lambda n, lambda^{-2} f):
/// solves the same system with the same harmonic time.
SliceState scaled_state(const SliceState& s, double lambda);

struct ScalingLawResult {
  double extent_base = 0.0;
  double extent_scaled = 0.0;
  double ratio = 0.0;
};

/// Runs temporal_extent on s0 and on the lambda-scaled data with thresholds
/// scaled by 1/lambda; the continuum law gives ratio = lambda exactly.
ScalingLawResult scaling_law_check(const SliceState& s0, double lambda,
                                   const std::array<double, 3>& p, double r0,
                                   const ThresholdConfig& thresholds,
                                   const EvolutionConfig& cfg);

/// Structural lower bound min(T*_1, r_h T*_1); T*_1 is a calibration input
/// (no closed form exists for it).
double extent_lower_bound(double alpha, double r_h, double t_star1);

}  // namespace evth
