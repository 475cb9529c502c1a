#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "uavvlc/config.hpp"

namespace uavvlc {

struct ResultRow {
  Scheme scheme = Scheme::greedy;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double mean_p_tot = 0.0;     // W
  double mean_sum_rate = 0.0;  // bits/s/Hz
  double mean_ee = 0.0;        // bits/s/Hz/W
  double feasibility_fraction = 0.0;
};

std::string csv_header();
/// Reals printed with 17 significant digits so rows compare bit-exactly as text.
std::string format_row(const ResultRow& row);
/// Throws std::runtime_error on a malformed line.
ResultRow parse_row(const std::string& line);
/// (scheme, sweep value, seed) as text; identifies a row within one config hash.
std::string row_key(const ResultRow& row);

/// Held-out evaluation tasks for one seed. Task draws do not depend on the
/// scheme, so every scheme is scored on the same tasks.
std::vector<Task> evaluation_tasks(const SystemConfig& cfg, std::uint64_t seed);

/// Training-task distribution used by meta-training and plain SAC training.
TaskSampler task_sampler(const SystemConfig& cfg);

/// Meta-training for one seed (dimensions follow cfg.model).
MetaState train_meta(const SystemConfig& cfg, std::uint64_t seed, const MetaProgress& progress = {});

/// Episodes of `scheme` on `task`. Learned schemes first spend cfg.adapt on
/// the task: meta-sac starts from `meta` (required), sac from scratch.
std::vector<EpisodeTrace> evaluate_scheme(const SystemConfig& cfg, Scheme scheme, const Task& task,
                                          std::uint64_t stream_seed, const MetaState* meta);

/// One CSV row: everything is derived from (cfg, scheme, sweep value, seed).
ResultRow run_point(const SystemConfig& cfg, Scheme scheme, double sweep_value, std::uint64_t seed);

struct RunSummary {
  int written = 0;
  int skipped = 0;  // rows already present in the file
};

/// Runs every (scheme, sweep value, seed) of cfg.experiment and appends rows to
/// `out`. Rows already present are skipped, so reruns are idempotent; an
/// existing file written under a different config hash is an error.
RunSummary run_experiment(const SystemConfig& cfg, const std::filesystem::path& out, int threads = 1,
                          const std::function<void(const ResultRow&)>& on_row = {});

/// Rows of an experiment CSV together with its config hash.
struct ResultFile {
  std::string config_hash;
  std::vector<ResultRow> rows;
};
ResultFile read_results(const std::filesystem::path& path);

}  // namespace uavvlc
