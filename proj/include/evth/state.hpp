#pragma once

#include <string>

#include "evth/calculus.hpp"
#include "evth/grid.hpp"

namespace evth {

/// Dynamical fields on one slice of the time-harmonic foliation. The gauge
/// density f is fixed at initialization and never mutated afterwards; the
/// identity n = f sqrt(det g) is preserved by the continuum evolution and is
/// tracked as a residual, not enforced.
struct SliceState {
  SymTensorField g;  // slice metric
  SymTensorField k;  // second fundamental form, sign convention dg/dtau = -2 n k
  ScalarField n;     // lapse, > 0
  ScalarField f;     // gauge density, > 0, frozen
  double tau = 0.0;  // harmonic time

  const GridSpec& grid() const { return g.grid(); }
};

/// Time derivative of the dynamical fields (the right-hand side of the
/// gauge-reduced system).
struct StateDerivative {
  SymTensorField dg, dk;
  ScalarField dn;
};

/// Build a state from (g0, k0, n0) with f := n0 / sqrt(det g0) and tau = 0.
/// The gauge residual of the returned state is exactly zero.
SliceState init_gauge(const SymTensorField& g0, const SymTensorField& k0,
                      const ScalarField& n0);

/// max over the grid of |n - f sqrt(det g)| / n.
double gauge_residual(const SliceState& s);

/// P^{ij} = k^{ij} - (tr k) g^{ij} (contravariant components).
SymTensorField p_variable(const SliceState& s);

/// Pointwise deformation-tensor proxy |pi|(x) = 2|k|_g + 2|grad log n|_g.
/// The factor 2 is a fixed convention; all monitor uses are threshold-relative.
ScalarField deformation_norm(const SliceState& s);

/// Per-step scalar diagnostics. Accumulator fields are non-decreasing over a
/// run; `dt` is the step that produced this state (0 for the initial row).
struct MonitorReport {
  long step = 0;
  double tau = 0.0;
  double dt = 0.0;
  double gauge_residual = 0.0;
  double ham_sup = 0.0;
  double ham_l2 = 0.0;
  double mom_sup = 0.0;
  double mom_l2 = 0.0;
  double breakdown_pointwise = 0.0;       // sup |pi| (deformation proxy)
  double breakdown_integral_accum = 0.0;  // int (sup(|k|+|grad log n|))^2 n dtau
  double pi_l1linf_accum = 0.0;           // int sup|pi| dtau
  double curvature_l2 = 0.0;              // int_domain (|E|^2+|B|^2) dmu
  double spectrum_min = 0.0;
  double spectrum_max = 0.0;
  double domain_radius = 0.0;
  double wave_energy = 0.0;
  double proper_time = 0.0;  // int n(center) dtau

  // internal to the run bookkeeping (not part of the CSV schema)
  double breakdown_sup_raw = 0.0;  // sup(|k|_g + |grad log n|_g), Eq-(14) form
  double n_domain_sup = 0.0;
  double n_center = 0.0;
  double vmax = 0.0;               // sup n sqrt(max eig g^{-1})
  double spectrum_drift_rate = 0.0;  // 2 sup n |k|_op, Gronwall integrand
  double speed_integral = 0.0;
  double gronwall_exponent = 0.0;  // int drift dtau
};

}  // namespace evth
