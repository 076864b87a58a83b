#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "evth/evolution.hpp"

namespace evth {

/// Exit statuses of the batch runner.
enum ExitCode : int {
  kExitTauEnd = 0,          // tau_end (or max_steps) reached
  kExitBreakdown = 2,       // a monitor threshold fired or the domain crushed
  kExitNumericalFailure = 3,  // StepFailed / NonPositiveDefinite / DtUnderflow
  kExitConfigError = 4,
};

struct RunConfig {
  int grid_npts = 16;
  double grid_period = 1.0;

  std::string initial_kind = "flat";  // flat | kasner | perturbed | checkpoint
  double kasner_p1 = 2.0 / 3.0;
  double kasner_p2 = 2.0 / 3.0;
  double kasner_f = 1.0;
  double kasner_tau0 = 0.0;
  double perturbed_amplitude = 1e-4;
  std::array<int, 3> perturbed_wavevector = {1, 0, 0};
  std::string initial_path;  // checkpoint kind

  EvolutionConfig evolution;
  ThresholdConfig thresholds;

  bool domain_enabled = false;
  std::array<double, 3> domain_center = {0.0, 0.0, 0.0};
  double domain_radius = 0.0;

  bool radius_diag_enabled = false;
  std::vector<double> radius_scales;
  int radius_l = 0;

  std::string csv_path;
  std::string checkpoint_path;
  long checkpoint_stride = 0;  // 0: only the final checkpoint
};

/// Parse the dotted-key configuration grammar (one `section.key = value` per
/// line, `#` comments). Unknown keys and malformed values raise ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Execute a configured run; CSV and checkpoints go to the configured paths,
/// a single machine-readable status record is printed as the last line of
/// `out`. Returns the exit code (never throws for runtime failures — they are
/// reported through the status record and code).
int run(const RunConfig& cfg, std::ostream& out);

/// Continue from a checkpoint under the given config (grid metadata must
/// agree). Bit-identical to the uninterrupted run over the same steps.
int resume(const std::string& checkpoint_path, const RunConfig& cfg, std::ostream& out);

}  // namespace evth
