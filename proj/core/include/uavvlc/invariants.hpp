#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavvlc/config.hpp"

namespace uavvlc {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick self-check of the model and learner plumbing under `cfg`.
std::vector<InvariantResult> run_invariants(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace uavvlc
