#include "evth/evolution.hpp"

#include <cmath>
#include <limits>

namespace evth {

void EvolutionConfig::validate() const {
  if (!(cfl_factor > 0.0) || cfl_factor > 1.0)
    throw ConfigError("cfl_factor must lie in (0, 1]");
  if (!(dt_floor > 0.0)) throw ConfigError("dt_floor must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
}

StateDerivative rhs(const SliceState& s) {
  return rhs(s, compute_geometry(s.g));
}

StateDerivative rhs(const SliceState& s, const StateGeometry& geo) {
  const GridSpec& grid = s.grid();
  const std::size_t np = grid.size();
  const MetricPointwise& mp = geo.mp;
  const Rank3Field& gamma = geo.gamma;
  const SymTensorField& ric = geo.ric;
  const SymTensorField hess = covariant_hessian(s.n, gamma);

  StateDerivative d{SymTensorField(grid), SymTensorField(grid), ScalarField(grid)};
  const ConstSym3Planes giv(mp.inverse), kv(s.k), rv(ric), hv(hess);
  const Sym3Planes dgv(d.dg), dkv(d.dk);
  const double* __restrict nv = s.n.data();
  double* __restrict dnv = d.dn.data();
  for (std::size_t p = 0; p < np; ++p) {
    const Sym3 gi = giv.load(p);
    const Sym3 kp = kv.load(p);
    const double n = nv[p];
    const double trk = trace_with_inverse(kp, gi);

    dgv.store(p, kp.scaled(-2.0 * n));

    const Sym3 ksq = mixed_square(kp, gi);
    Sym3 dk = rv.load(p).plus(kp.scaled(trk)).plus(ksq.scaled(-2.0)).scaled(n);
    dk = dk.plus(hv.load(p).scaled(-1.0));
    dkv.store(p, dk);

    dnv[p] = -n * n * trk;
  }
  return d;
}

namespace {

double vmax_over_mask(const SliceState& s, const DomainMask& mask) {
  return coordinate_speed_sup(s, mask);
}

SliceState stage_state(const SliceState& base, double coeff, const StateDerivative& d) {
  SliceState out;
  out.g = base.g;
  out.k = base.k;
  out.n = base.n;
  out.f = base.f;
  out.tau = base.tau + coeff;
  const std::size_t total = out.g.raw().size();
  {
    double* __restrict y = out.g.raw().data();
    const double* __restrict x = d.dg.raw().data();
    for (std::size_t i = 0; i < total; ++i) y[i] += coeff * x[i];
  }
  {
    double* __restrict y = out.k.raw().data();
    const double* __restrict x = d.dk.raw().data();
    for (std::size_t i = 0; i < total; ++i) y[i] += coeff * x[i];
  }
  {
    double* __restrict y = out.n.raw().data();
    const double* __restrict x = d.dn.raw().data();
    const std::size_t nn = out.n.raw().size();
    for (std::size_t i = 0; i < nn; ++i) y[i] += coeff * x[i];
  }
  return out;
}

void check_lapse_positive(const SliceState& s) {
  const std::size_t np = s.grid().size();
  for (std::size_t p = 0; p < np; ++p)
    if (!(s.n[p] > 0.0)) throw NonPositiveLapseError(p);
}

}  // namespace

double cfl_dt(const SliceState& s, const EvolutionConfig& cfg) {
  const double vmax = vmax_over_mask(s, DomainMask::full(s.grid()));
  const double dt = cfg.cfl_factor * s.grid().spacing() / vmax;
  if (dt < cfg.dt_floor) throw DtUnderflowError(dt, cfg.dt_floor);
  return dt;
}

SliceState step_rk4(const SliceState& s, double dt, const StateDerivative* stage1) {
  auto guarded_rhs = [](const SliceState& stage, int index) {
    try {
      check_lapse_positive(stage);
      return rhs(stage);
    } catch (const NonPositiveDefiniteError& e) {
      throw StepFailedError(index, e.what());
    } catch (const NonPositiveLapseError& e) {
      throw StepFailedError(index, e.what());
    }
  };

  const StateDerivative k1 = stage1 ? *stage1 : guarded_rhs(s, 1);
  const StateDerivative k2 = guarded_rhs(stage_state(s, 0.5 * dt, k1), 2);
  const StateDerivative k3 = guarded_rhs(stage_state(s, 0.5 * dt, k2), 3);
  const StateDerivative k4 = guarded_rhs(stage_state(s, dt, k3), 4);

  SliceState out;
  out.g = s.g;
  out.k = s.k;
  out.n = s.n;
  out.f = s.f;
  out.tau = s.tau + dt;
  const double w = dt / 6.0;
  auto accumulate = [&](std::span<double> y, std::span<const double> a,
                        std::span<const double> b, std::span<const double> c,
                        std::span<const double> d) {
    double* __restrict yp = y.data();
    for (std::size_t i = 0; i < y.size(); ++i)
      yp[i] += w * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
  };
  accumulate(out.g.raw(), k1.dg.raw(), k2.dg.raw(), k3.dg.raw(), k4.dg.raw());
  accumulate(out.k.raw(), k1.dk.raw(), k2.dk.raw(), k3.dk.raw(), k4.dk.raw());
  accumulate(out.n.raw(), k1.dn.raw(), k2.dn.raw(), k3.dn.raw(), k4.dn.raw());
  return out;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::TauEnd: return "tau_end";
    case Termination::MaxSteps: return "max_steps";
    case Termination::MonitorThreshold: return "monitor_threshold";
    case Termination::DtUnderflow: return "dt_underflow";
    case Termination::StepFailed: return "step_failed";
    case Termination::DomainCrushed: return "domain_crushed";
  }
  return "unknown";
}

EvolveResult evolve(const SliceState& s0, const EvolutionConfig& cfg,
                    const MonitorConfig& mon) {
  cfg.validate();
  mon.thresholds.validate();
  const GridSpec& grid = s0.grid();
  const double sign = cfg.direction == Direction::Forward ? 1.0 : -1.0;

  EvolveResult res;
  res.state = s0;
  res.domain = mon.domain;

  if (mon.resume && res.domain) {
    res.domain->radius = mon.resume->domain_radius;
    res.domain->speed_integral = mon.resume->speed_integral;
  } else if (res.domain) {
    // The stencil-halo margin: one grid spacing, applied once per run batch.
    try {
      res.domain = shrink_domain(*res.domain, res.state, 0.0, 1);
    } catch (const DomainCrushedError&) {
      res.reason = Termination::DomainCrushed;
      res.detail = "domain crushed by the stencil-halo margin at startup";
      return res;
    }
  }

  const std::array<double, 3> probe =
      res.domain ? res.domain->center : std::array<double, 3>{0.0, 0.0, 0.0};

  auto mask_for = [&](const std::optional<DomainSpec>& d) {
    return d ? DomainMask::ball(grid, *d) : DomainMask::full(grid);
  };

  DomainMask mask = mask_for(res.domain);

  auto finish_report = [&](MonitorReport& r, const MonitorReport* prev, double dt,
                           long step) {
    r.step = step;
    r.dt = dt;
    if (prev != nullptr) {
      const double adt = std::abs(dt);
      r.breakdown_integral_accum =
          prev->breakdown_integral_accum +
          0.5 *
              (prev->breakdown_sup_raw * prev->breakdown_sup_raw * prev->n_domain_sup +
               r.breakdown_sup_raw * r.breakdown_sup_raw * r.n_domain_sup) *
              adt;
      r.pi_l1linf_accum = prev->pi_l1linf_accum +
                          0.5 * (prev->breakdown_pointwise + r.breakdown_pointwise) * adt;
      r.proper_time = prev->proper_time + 0.5 * (prev->n_center + r.n_center) * adt;
      r.gronwall_exponent =
          prev->gronwall_exponent +
          0.5 * (prev->spectrum_drift_rate + r.spectrum_drift_rate) * adt;
    }
    r.speed_integral = res.domain ? res.domain->speed_integral : 0.0;
    r.domain_radius = res.domain ? res.domain->radius : 0.0;
  };

  auto gronwall_check = [&](const MonitorReport& r) {
    const double cprime =
        quasi_isometry_bound(mon.thresholds.spectrum_bound, r.gronwall_exponent);
    const double ratio = std::min(r.spectrum_min * cprime, cprime / r.spectrum_max);
    if (ratio < res.worst_gronwall_ratio) res.worst_gronwall_ratio = ratio;
    if (ratio < 1.0 / (1.0 + 1e-6)) res.gronwall_ok = false;
  };

  // Which monitor, if any, exceeded its threshold.
  auto fired_monitor = [&](const MonitorReport& r) -> std::string {
    const ThresholdConfig& t = mon.thresholds;
    if (r.breakdown_pointwise > t.pointwise_threshold) return "breakdown_pointwise";
    if (r.breakdown_integral_accum > t.integral_threshold) return "breakdown_integral";
    if (r.pi_l1linf_accum > t.pi_l1_threshold) return "pi_l1";
    if (r.spectrum_min < 1.0 / t.spectrum_bound || r.spectrum_max > t.spectrum_bound)
      return "spectrum";
    return {};
  };

  StateDerivative deriv;
  StateGeometry geo;
  try {
    geo = compute_geometry(res.state.g);
    deriv = rhs(res.state, geo);
  } catch (const NonPositiveDefiniteError& e) {
    res.reason = Termination::StepFailed;
    res.detail = e.what();
    return res;
  }

  MonitorReport report = compute_monitor_report(
      res.state, mon.compute_wave_energy ? &deriv : nullptr, mask, probe, &geo);
  const long step0 = mon.resume ? mon.resume->step : 0;
  finish_report(report, nullptr, 0.0, step0);
  if (mon.resume) {
    report.proper_time = mon.resume->proper_time;
    report.breakdown_integral_accum = mon.resume->breakdown_integral;
    report.pi_l1linf_accum = mon.resume->pi_l1;
    report.gronwall_exponent = mon.resume->gronwall_exponent;
  }
  gronwall_check(report);
  res.reports.push_back(report);
  if (mon.on_report) mon.on_report(res.state, report);

  if (auto fired = fired_monitor(report); !fired.empty()) {
    res.reason = Termination::MonitorThreshold;
    res.detail = fired;
    return res;
  }

  long step = step0;
  while (true) {
    if (step >= cfg.max_steps) {
      res.reason = Termination::MaxSteps;
      return res;
    }
    const double remaining = sign * (cfg.tau_end - res.state.tau);
    if (remaining <= 0.0) {
      res.reason = Termination::TauEnd;
      return res;
    }

    double dt_mag;
    {
      const double vmax = vmax_over_mask(res.state, mask);
      dt_mag = cfg.cfl_factor * grid.spacing() / vmax;
      if (dt_mag < cfg.dt_floor) {
        res.reason = Termination::DtUnderflow;
        res.detail = "cfl dt " + std::to_string(dt_mag) + " below floor";
        return res;
      }
      if (dt_mag > remaining) dt_mag = remaining;  // land exactly on tau_end
    }
    const double dt = sign * dt_mag;

    SliceState next;
    try {
      next = step_rk4(res.state, dt, &deriv);
    } catch (const StepFailedError& e) {
      res.reason = Termination::StepFailed;
      res.detail = e.what();
      return res;
    }

    if (res.domain) {
      try {
        res.domain = shrink_domain(*res.domain, next, dt);
      } catch (const DomainCrushedError&) {
        res.reason = Termination::DomainCrushed;
        res.detail = "domain radius reached zero";
        res.state = next;
        return res;
      }
      mask = mask_for(res.domain);
    }

    StateDerivative next_deriv;
    StateGeometry next_geo;
    try {
      next_geo = compute_geometry(next.g);
      next_deriv = rhs(next, next_geo);
    } catch (const NonPositiveDefiniteError& e) {
      res.reason = Termination::StepFailed;
      res.detail = e.what();
      res.state = next;
      return res;
    }

    ++step;
    MonitorReport next_report = compute_monitor_report(
        next, mon.compute_wave_energy ? &next_deriv : nullptr, mask, probe, &next_geo);
    finish_report(next_report, &report, dt, step);
    gronwall_check(next_report);

    res.state = next;
    deriv = next_deriv;
    report = next_report;
    res.reports.push_back(report);
    if (mon.on_report) mon.on_report(res.state, report);

    if (auto fired = fired_monitor(report); !fired.empty()) {
      res.reason = Termination::MonitorThreshold;
      res.detail = fired;
      return res;
    }
  }
}

}  // namespace evth
