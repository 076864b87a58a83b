#pragma once

#include <span>
#include <utility>

#include "evth/domain.hpp"
#include "evth/state.hpp"

namespace evth {

/// Thresholds for the runtime breakdown monitors. All positive; a run stops
/// with a detected-breakdown status when one is exceeded.
struct ThresholdConfig {
  double pointwise_threshold = 1e100;  // on sup|pi| (deformation proxy)
  double integral_threshold = 1e100;   // on int (sup(|k|+|grad log n|))^2 n dtau
  double pi_l1_threshold = 1e100;      // on int sup|pi| dtau
  double spectrum_bound = 1e100;       // C > 1: eigenvalues must stay in [1/C, C]

  void validate() const;
  ThresholdConfig scaled(double factor) const {
    return {pointwise_threshold * factor, integral_threshold * factor,
            pi_l1_threshold * factor, spectrum_bound};
  }
};

/// H = R(g) - |k|^2_g + (tr k)^2 (general-gauge form of the Hamiltonian
/// constraint; reduces to R = |k|^2 when tr k = 0).
ScalarField hamiltonian_residual(const SliceState& s);

/// M_i = div k_i - grad_i tr k (general-gauge momentum constraint).
Vec3Field momentum_residual(const SliceState& s);

struct ElectricMagnetic {
  SymTensorField electric;  // E_ij = R_ij + (tr k) k_ij - k_i^a k_aj
  SymTensorField magnetic;  // B_ij = sym eps_i^{ab} nabla_a k_bj
};

ElectricMagnetic electric_magnetic(const SliceState& s);

/// int_domain (|E|^2_g + |B|^2_g) dmu — proportional to the spacetime
/// curvature L2 norm in vacuum.
double curvature_l2(const SliceState& s, const DomainMask& mask);

/// Extreme eigenvalues of g_ij over the domain in the fixed chart.
std::pair<double, double> spectrum_monitor(const SliceState& s, const DomainMask& mask);

/// Quasi-isometry constant from the accumulated eigenvalue-drift exponent:
/// C' = C exp(int 2 sup n|k|_op dtau).
double quasi_isometry_bound(double spectrum_c, double drift_exponent);

/// Trapezoidal drift exponent over a report history (uses each report's
/// spectrum_drift_rate and dt).
double gronwall_exponent(std::span<const MonitorReport> reports);

/// 1/2 int_domain (n^{-2} |du|^2_g + |grad u|^2_g) dmu — the slice energy of
/// the wave equation satisfied by u; applied to u = k during runs.
double wave_energy(const SymTensorField& u, const SymTensorField& du_dtau,
                   const SliceState& s, const DomainMask& mask);

/// All per-step instantaneous monitor values (accumulators left at zero; the
/// evolution loop folds them in trapezoidally). `du_k` is the tau-derivative
/// of k used for the wave energy; pass nullptr to skip that column. A
/// precomputed StateGeometry for s.g avoids recomputing the shared pieces.
MonitorReport compute_monitor_report(const SliceState& s, const StateDerivative* du_k,
                                     const DomainMask& mask,
                                     const std::array<double, 3>& proper_time_probe,
                                     const StateGeometry* precomputed = nullptr);

}  // namespace evth
