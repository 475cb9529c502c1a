#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "uavvlc/sac.hpp"

namespace uavvlc {

inline constexpr int kCheckpointVersion = 1;

/// Line-oriented text format. Reals are written as hexfloats so parameters
/// round-trip bit-exactly. Malformed input throws std::runtime_error.
void write_agent(std::ostream& out, const SacAgent& agent);
SacAgent read_agent(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const SacAgent& agent);
SacAgent load_checkpoint(const std::filesystem::path& path);

namespace ckpt {

/// Helpers shared with the meta-learning checkpoint.
std::string hex(double v);
double parse_real(const std::string& token);
std::string next_token(std::istream& in);
void expect(std::istream& in, const std::string& token);

}  // namespace ckpt
}  // namespace uavvlc
