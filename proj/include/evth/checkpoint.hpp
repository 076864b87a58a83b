#pragma once

#include <optional>
#include <string>

#include "evth/state.hpp"

namespace evth {

/// Run bookkeeping carried across a checkpoint so a resumed run continues its
/// accumulator columns exactly.
struct RunAccumulators {
  long step = 0;
  double proper_time = 0.0;
  double speed_integral = 0.0;
  double domain_radius = 0.0;
  double breakdown_integral = 0.0;
  double pi_l1 = 0.0;
  double gronwall_exponent = 0.0;
};

/// Bit-exact state snapshot: magic "EVTH1\n", one key:value header line, then
/// little-endian 64-bit floats g (6 planes), k (6), n, f, each plane npts^3
/// values in x-fastest order. The writer is deterministic; doubles in the
/// header are printed with 17 significant digits (round-trip exact).
void write_checkpoint(const SliceState& s, const RunAccumulators& acc,
                      const std::string& path);

struct CheckpointData {
  SliceState state;
  RunAccumulators accumulators;
};

/// Throws ConfigError on a missing file, bad magic, malformed header or
/// truncated payload.
CheckpointData read_checkpoint(const std::string& path);

}  // namespace evth
