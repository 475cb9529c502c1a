#pragma once

#include <iosfwd>
#include <string>

#include "uavvlc/env.hpp"

namespace uavvlc {

/// Per-slot episode CSV: reward, power breakdown, per-user rates, C1..C9 bits,
/// position and velocity. `config_hash` goes into a leading comment line.
void write_trace_csv(std::ostream& out, const EpisodeTrace& trace, const std::string& config_hash);

}  // namespace uavvlc
