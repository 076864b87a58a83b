#pragma once

#include <array>

#include "evth/state.hpp"

namespace evth {

/// Kasner exponents with a homogeneous gauge density. In harmonic time the
/// exact solution is
///   g_ii(tau) = exp(2 p_i f tau),  n(tau) = f exp(f tau),
///   k_ii(tau) = -p_i exp((2 p_i - 1) f tau),  tr k = -exp(-f tau),
/// obtained from the proper-time form g = diag(t^{2 p_i}) via t = exp(f tau).
struct KasnerParams {
  double p1, p2, p3;
  double f;

  KasnerParams(double p1_, double p2_, double p3_, double f_);

  /// p3 := 1 - p1 - p2, then validate the quadratic constraint.
  static KasnerParams from_two(double p1, double p2, double f);

  std::array<double, 3> exponents() const { return {p1, p2, p3}; }
};

SliceState kasner_state(const KasnerParams& kp, double tau, const GridSpec& grid);

/// g = delta, k = 0, n = f = 1: a fixed point of the evolution.
SliceState flat_state(const GridSpec& grid);

/// g = delta + amplitude sin(2 pi <m,x>/L) e_TT(m), k = 0, n = 1, f from
/// init_gauge. Constraint violation is O(amplitude^2).
SliceState perturbed_flat(const GridSpec& grid, double amplitude,
                          const std::array<int, 3>& wavevector);

}  // namespace evth
