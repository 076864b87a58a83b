#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evth/diagnostics.hpp"
#include "evth/domain.hpp"
#include "evth/state.hpp"

namespace evth {

enum class Direction { Forward, Backward };

struct EvolutionConfig {
  double cfl_factor = 0.25;
  double tau_end = 1.0;
  long max_steps = 1000000;
  Direction direction = Direction::Forward;
  double dt_floor = 1e-12;

  void validate() const;
};

/// Right-hand side of the gauge-reduced system:
///   dg_ij = -2 n k_ij
///   dk_ij = -hess_ij n + n (R_ij + (tr k) k_ij - 2 k_i^a k_aj)
///   dn    = -n^2 tr k
/// The (tr k) k term is required off the maximal slicing; the closed-form
/// Kasner solution is reproduced only with it.
StateDerivative rhs(const SliceState& s);
StateDerivative rhs(const SliceState& s, const StateGeometry& geo);

/// cfl_factor * spacing / v_max with v_max the grid sup of n sqrt(max eig
/// g^{-1}). Throws DtUnderflowError below cfg.dt_floor.
double cfl_dt(const SliceState& s, const EvolutionConfig& cfg);

/// Classical RK4 on (g, k, n); tau advances by dt, f is copied unchanged.
/// An optional precomputed rhs(s) is used as the first stage.
SliceState step_rk4(const SliceState& s, double dt,
                    const StateDerivative* stage1 = nullptr);

enum class Termination {
  TauEnd,
  MaxSteps,
  MonitorThreshold,
  DtUnderflow,
  StepFailed,
  DomainCrushed,
};

const char* termination_name(Termination t);

/// Accumulator values restored from a checkpoint; when present the startup
/// stencil-halo shrink is skipped (it was applied by the original run).
struct ResumeSeed {
  long step = 0;
  double proper_time = 0.0;
  double speed_integral = 0.0;
  double domain_radius = 0.0;
  double breakdown_integral = 0.0;
  double pi_l1 = 0.0;
  double gronwall_exponent = 0.0;
};

struct MonitorConfig {
  ThresholdConfig thresholds;
  std::optional<DomainSpec> domain;  // localized monitoring (and CFL) if set
  bool compute_wave_energy = true;
  std::optional<ResumeSeed> resume;
  /// Invoked after every report row (including the initial one).
  std::function<void(const SliceState&, const MonitorReport&)> on_report;
};

struct EvolveResult {
  SliceState state;
  std::vector<MonitorReport> reports;
  Termination reason = Termination::TauEnd;
  std::string detail;              // fired monitor / failure description
  std::optional<DomainSpec> domain;  // final domain when localized
  double worst_gronwall_ratio = std::numeric_limits<double>::infinity();
  bool gronwall_ok = true;
};

/// Monitored method-of-lines loop: cfl_dt + step_rk4 + diagnostics until
/// tau_end, max_steps, a monitor threshold, DtUnderflow, StepFailed or
/// DomainCrushed. All failures are returned as data, not thrown.
EvolveResult evolve(const SliceState& s0, const EvolutionConfig& cfg,
                    const MonitorConfig& mon);

}  // namespace evth
