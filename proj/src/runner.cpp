#include "evth/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "evth/checkpoint.hpp"
#include "evth/oracles.hpp"
#include "evth/radius.hpp"

namespace evth {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("trailing junk in value for " + key);
  return out;
}

long parse_long(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  const long l = static_cast<long>(d);
  if (static_cast<double>(l) != d) throw ConfigError(key + " must be an integer");
  return l;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + " must be true or false");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + " needs at least one value");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError("empty value for " + key);

    if (key == "grid.npts") cfg.grid_npts = static_cast<int>(parse_long(key, val));
    else if (key == "grid.period") cfg.grid_period = parse_double(key, val);
    else if (key == "initial.kind") cfg.initial_kind = val;
    else if (key == "initial.p1") cfg.kasner_p1 = parse_double(key, val);
    else if (key == "initial.p2") cfg.kasner_p2 = parse_double(key, val);
    else if (key == "initial.f") cfg.kasner_f = parse_double(key, val);
    else if (key == "initial.tau0") cfg.kasner_tau0 = parse_double(key, val);
    else if (key == "initial.amplitude") cfg.perturbed_amplitude = parse_double(key, val);
    else if (key == "initial.wavevector") {
      const auto v = parse_list(key, val);
      if (v.size() != 3) throw ConfigError(key + " needs three integers");
      for (int a = 0; a < 3; ++a) {
        cfg.perturbed_wavevector[a] = static_cast<int>(v[a]);
        if (static_cast<double>(cfg.perturbed_wavevector[a]) != v[a])
          throw ConfigError(key + " entries must be integers");
      }
    } else if (key == "initial.path") cfg.initial_path = val;
    else if (key == "evolution.cfl") cfg.evolution.cfl_factor = parse_double(key, val);
    else if (key == "evolution.tau_end") cfg.evolution.tau_end = parse_double(key, val);
    else if (key == "evolution.direction") {
      if (val == "forward") cfg.evolution.direction = Direction::Forward;
      else if (val == "backward") cfg.evolution.direction = Direction::Backward;
      else throw ConfigError("evolution.direction must be forward or backward");
    } else if (key == "evolution.max_steps") cfg.evolution.max_steps = parse_long(key, val);
    else if (key == "evolution.dt_floor") cfg.evolution.dt_floor = parse_double(key, val);
    else if (key == "thresholds.pointwise") cfg.thresholds.pointwise_threshold = parse_double(key, val);
    else if (key == "thresholds.integral") cfg.thresholds.integral_threshold = parse_double(key, val);
    else if (key == "thresholds.pi_l1") cfg.thresholds.pi_l1_threshold = parse_double(key, val);
    else if (key == "thresholds.spectrum_c") cfg.thresholds.spectrum_bound = parse_double(key, val);
    else if (key == "domain.enabled") cfg.domain_enabled = parse_bool(key, val);
    else if (key == "domain.center") {
      const auto v = parse_list(key, val);
      if (v.size() != 3) throw ConfigError(key + " needs three coordinates");
      cfg.domain_center = {v[0], v[1], v[2]};
    } else if (key == "domain.radius") cfg.domain_radius = parse_double(key, val);
    else if (key == "radius_diagnostics.enabled") cfg.radius_diag_enabled = parse_bool(key, val);
    else if (key == "radius_diagnostics.scales") cfg.radius_scales = parse_list(key, val);
    else if (key == "radius_diagnostics.l") cfg.radius_l = static_cast<int>(parse_long(key, val));
    else if (key == "output.csv") cfg.csv_path = val;
    else if (key == "output.checkpoint") cfg.checkpoint_path = val;
    else if (key == "output.checkpoint_stride") cfg.checkpoint_stride = parse_long(key, val);
    else throw ConfigError("unknown configuration key: " + key);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

constexpr const char* kCsvSchema = "# evth-monitor-csv v1";
constexpr const char* kCsvHeader =
    "step,tau,dt,gauge_residual,ham_sup,ham_l2,mom_sup,breakdown_pointwise,"
    "breakdown_integral,pi_l1,curvature_l2,spectrum_min,spectrum_max,"
    "domain_radius,wave_energy,proper_time";

void write_csv_row(std::ofstream& csv, const MonitorReport& r) {
  csv << r.step << ',' << fmt17(r.tau) << ',' << fmt17(r.dt) << ','
      << fmt17(r.gauge_residual) << ',' << fmt17(r.ham_sup) << ',' << fmt17(r.ham_l2)
      << ',' << fmt17(r.mom_sup) << ',' << fmt17(r.breakdown_pointwise) << ','
      << fmt17(r.breakdown_integral_accum) << ',' << fmt17(r.pi_l1linf_accum) << ','
      << fmt17(r.curvature_l2) << ',' << fmt17(r.spectrum_min) << ','
      << fmt17(r.spectrum_max) << ',' << fmt17(r.domain_radius) << ','
      << fmt17(r.wave_energy) << ',' << fmt17(r.proper_time) << '\n';
}

SliceState build_initial_state(const RunConfig& cfg,
                               std::optional<RunAccumulators>* restored) {
  const GridSpec grid(cfg.grid_npts, cfg.grid_period);
  if (cfg.initial_kind == "flat") return flat_state(grid);
  if (cfg.initial_kind == "kasner") {
    const KasnerParams kp = KasnerParams::from_two(cfg.kasner_p1, cfg.kasner_p2, cfg.kasner_f);
    return kasner_state(kp, cfg.kasner_tau0, grid);
  }
  if (cfg.initial_kind == "perturbed")
    return perturbed_flat(grid, cfg.perturbed_amplitude, cfg.perturbed_wavevector);
  if (cfg.initial_kind == "checkpoint") {
    if (cfg.initial_path.empty()) throw ConfigError("initial.path required for checkpoint start");
    CheckpointData data = read_checkpoint(cfg.initial_path);
    if (!(data.state.grid() == grid))
      throw ConfigError("checkpoint grid does not match the configured grid");
    if (restored) *restored = data.accumulators;
    return data.state;
  }
  throw ConfigError("unknown initial.kind: " + cfg.initial_kind);
}

int execute(const RunConfig& cfg, std::ostream& out,
            const std::optional<std::string>& resume_path) {
  SliceState s0;
  std::optional<RunAccumulators> restored;
  try {
    cfg.evolution.validate();
    cfg.thresholds.validate();
    if (resume_path) {
      CheckpointData data = read_checkpoint(*resume_path);
      const GridSpec grid(cfg.grid_npts, cfg.grid_period);
      if (!(data.state.grid() == grid))
        throw ConfigError("resume checkpoint grid does not match the configured grid");
      s0 = data.state;
      restored = data.accumulators;
    } else {
      s0 = build_initial_state(cfg, &restored);
    }
  } catch (const std::exception& e) {
    out << "{\"termination\":\"config_error\",\"error\":\"" << e.what() << "\"}\n";
    return kExitConfigError;
  }

  std::ofstream csv;
  if (!cfg.csv_path.empty()) {
    csv.open(cfg.csv_path, std::ios::trunc);
    if (!csv) {
      out << "{\"termination\":\"config_error\",\"error\":\"cannot open csv path\"}\n";
      return kExitConfigError;
    }
    csv << kCsvSchema << '\n' << kCsvHeader << '\n';
  }

  MonitorConfig mon;
  mon.thresholds = cfg.thresholds;
  if (cfg.domain_enabled)
    mon.domain = DomainSpec{cfg.domain_center, cfg.domain_radius, 0.0};
  if (restored) {
    mon.resume = ResumeSeed{restored->step,
                            restored->proper_time,
                            restored->speed_integral,
                            restored->domain_radius,
                            restored->breakdown_integral,
                            restored->pi_l1,
                            restored->gronwall_exponent};
  }

  MonitorReport last_report;
  mon.on_report = [&](const SliceState& s, const MonitorReport& r) {
    if (csv.is_open()) write_csv_row(csv, r);
    last_report = r;
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_stride > 0 && r.step > 0 &&
        r.step % cfg.checkpoint_stride == 0) {
      RunAccumulators acc{r.step,
                          r.proper_time,
                          r.speed_integral,
                          r.domain_radius,
                          r.breakdown_integral_accum,
                          r.pi_l1linf_accum,
                          r.gronwall_exponent};
      write_checkpoint(s, acc, cfg.checkpoint_path + ".step" + std::to_string(r.step));
    }
  };

  const EvolveResult res = evolve(s0, cfg.evolution, mon);

  if (csv.is_open()) csv.close();

  if (!cfg.checkpoint_path.empty() && !res.reports.empty()) {
    const MonitorReport& r = res.reports.back();
    RunAccumulators acc{r.step,
                        r.proper_time,
                        r.speed_integral,
                        r.domain_radius,
                        r.breakdown_integral_accum,
                        r.pi_l1linf_accum,
                        r.gronwall_exponent};
    write_checkpoint(res.state, acc, cfg.checkpoint_path);
  }

  nlohmann::json record;
  record["termination"] = termination_name(res.reason);
  if (!res.detail.empty()) record["detail"] = res.detail;
  record["final_tau"] = res.state.tau;
  record["steps"] = res.reports.empty() ? 0L : res.reports.back().step;
  record["proper_time"] = res.reports.empty() ? 0.0 : res.reports.back().proper_time;
  record["gronwall_ok"] = res.gronwall_ok;

  nlohmann::json worst;
  double w_gauge = 0, w_ham = 0, w_mom = 0, w_break = 0, w_curv = 0;
  for (const MonitorReport& r : res.reports) {
    w_gauge = std::max(w_gauge, r.gauge_residual);
    w_ham = std::max(w_ham, r.ham_sup);
    w_mom = std::max(w_mom, r.mom_sup);
    w_break = std::max(w_break, r.breakdown_pointwise);
    w_curv = std::max(w_curv, r.curvature_l2);
  }
  worst["gauge_residual"] = w_gauge;
  worst["ham_sup"] = w_ham;
  worst["mom_sup"] = w_mom;
  worst["breakdown_pointwise"] = w_break;
  worst["curvature_l2"] = w_curv;
  record["worst_monitors"] = worst;

  if (cfg.radius_diag_enabled && !cfg.radius_scales.empty()) {
    try {
      const std::array<double, 3> p =
          cfg.domain_enabled ? cfg.domain_center : std::array<double, 3>{0.0, 0.0, 0.0};
      const RadiusReport rr = volume_radius(res.state.g, p, cfg.radius_scales);
      const double cr =
          chart_radius(res.state.g, p, cfg.radius_l, 0.25 * res.state.grid().period());
      nlohmann::json rj;
      rj["volume_radius_ratio"] = rr.volume_radius_ratio;
      rj["chart_radius"] = cr;
      rj["scales"] = rr.scales_tested;
      rj["ratios"] = rr.ratios;
      record["radius"] = rj;
    } catch (const std::exception& e) {
      record["radius_error"] = e.what();
    }
  }

  out << record.dump() << '\n';

  switch (res.reason) {
    case Termination::TauEnd:
    case Termination::MaxSteps:
      return kExitTauEnd;
    case Termination::MonitorThreshold:
    case Termination::DomainCrushed:
      return kExitBreakdown;
    case Termination::DtUnderflow:
    case Termination::StepFailed:
      return kExitNumericalFailure;
  }
  return kExitNumericalFailure;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out) {
  return execute(cfg, out, std::nullopt);
}

int resume(const std::string& checkpoint_path, const RunConfig& cfg, std::ostream& out) {
  return execute(cfg, out, checkpoint_path);
}

}  // namespace evth
