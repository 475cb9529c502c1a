#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavvlc/baselines.hpp"
#include "uavvlc/env.hpp"
#include "uavvlc/meta_sac.hpp"
#include "uavvlc/sac.hpp"
#include "uavvlc/training.hpp"

namespace uavvlc {

enum class Scheme { meta_sac, sac, greedy, random };
enum class SweepVariable { users, p_max, r_min, n_leds };

std::string_view to_string(Scheme s);
std::string_view to_string(SweepVariable v);
Scheme parse_scheme(std::string_view name);
SweepVariable parse_sweep_variable(std::string_view name);

struct ExperimentSpec {
  std::string scenario = "default";
  SweepVariable variable = SweepVariable::users;
  std::vector<double> values = {5.0};
  int seeds = 20;
  std::uint64_t seed_base = 0;
  std::vector<Scheme> schemes = {Scheme::greedy, Scheme::random};
  std::string output = "results.csv";
  int eval_tasks = 1;     // held-out tasks per seed
  int eval_episodes = 1;  // evaluation episodes per task

  void validate() const;
};

/// Every tunable of a run. Defaults are the reference simulation parameters.
struct SystemConfig {
  SystemModel model;
  EnvConfig env;
  TaskRegion tasks;
  SacHyper sac;
  MetaConfig meta;
  TrainConfig train;  // plain SAC training on the task distribution
  TrainConfig adapt;  // per-task budget shared by meta-adaptation and cold-start SAC
  GreedyConfig greedy;
  ExperimentSpec experiment;

  void validate() const;
};

/// Parse or range error. what() reads "<source>:<line>: <message>" whenever a
/// line is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SystemConfig parse_config(const std::string& text, const std::string& source = "<config>");
SystemConfig load_config(const std::filesystem::path& path);

/// Canonical YAML: every key, fixed order, reals printed with 17 significant digits.
std::string dump_config(const SystemConfig& cfg);
/// 64-bit FNV-1a of dump_config().
std::uint64_t config_hash(const SystemConfig& cfg);
std::string config_hash_hex(const SystemConfig& cfg);

/// The configuration with one sweep variable overridden.
SystemConfig with_sweep_value(const SystemConfig& cfg, SweepVariable variable, double value);

/// Human-readable notes about known ambiguities in the parameter set.
std::vector<std::string> config_notes(const SystemConfig& cfg);

}  // namespace uavvlc
