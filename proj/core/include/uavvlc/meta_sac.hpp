#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "uavvlc/env.hpp"
#include "uavvlc/replay_buffer.hpp"
#include "uavvlc/sac.hpp"
#include "uavvlc/training.hpp"

namespace uavvlc {

struct MetaConfig {
  int n_tasks = 4;
  int iterations = 200;
  int inner_steps = 5;
  double inner_lr_actor = 1e-3;
  double inner_lr_critic = 1e-3;
  double support_fraction = 0.8;
  int warmup_episodes = 2;            // random-action episodes per task before iteration 0
  int episodes_per_iteration = 1;     // rollouts per task per meta-iteration
  std::size_t task_buffer_capacity = 20000;
  // Meta-adaptation (D_ada) learning rates.
  double adapt_lr_actor = 3e-4;
  double adapt_lr_critic1 = 3e-4;
  double adapt_lr_critic2 = 3e-4;

  void validate() const;
};

/// Per-task replay data D_t with a support/query partition that is redrawn
/// every meta-iteration. The two index sets always partition the buffer.
class TaskBuffer {
 public:
  explicit TaskBuffer(std::size_t capacity) : data_(capacity) {}

  ReplayBuffer& data() { return data_; }
  const ReplayBuffer& data() const { return data_; }
  const std::vector<std::size_t>& support() const { return support_; }
  const std::vector<std::size_t>& query() const { return query_; }

  /// Shuffles the stored transitions into support (fraction) and query sets;
  /// each side keeps at least one transition when the buffer holds two or more.
  void resplit(double support_fraction, Rng& rng);
  Batch sample_support(std::size_t n, Rng& rng) const;
  Batch sample_query(std::size_t n, Rng& rng) const;

 private:
  Batch sample_from(const std::vector<std::size_t>& pool, std::size_t n, Rng& rng) const;

  ReplayBuffer data_;
  std::vector<std::size_t> support_;
  std::vector<std::size_t> query_;
};

/// Runs `steps` calls of `step` on a copy of `global`; the original is untouched.
template <class Learner, class Step>
Learner adapt_copy(const Learner& global, int steps, Step&& step) {
  Learner local = global;
  for (int i = 0; i < steps; ++i) step(local);
  return local;
}

/// Inner loop: fresh ADAM state at the inner rates, `cfg.inner_steps`
/// simultaneous SAC updates on support batches.
SacAgent inner_adapt(const SacAgent& global, const TaskBuffer& buffer, const MetaConfig& cfg, Rng& rng);

/// First-order outer step: gradients of every task's query losses taken at its
/// adapted parameters, summed, and applied to the global learner with ADAM.
SacGradients outer_update(SacAgent& global, std::span<const SacAgent> adapted, std::span<const Batch> query,
                          Rng& rng);

struct MetaState {
  SacAgent global;
  std::vector<Task> tasks;
  std::vector<TaskBuffer> buffers;
  std::int64_t iteration = 0;
  std::uint64_t seed = 0;
  std::vector<double> query_loss;  // summed critic + actor query loss per iteration
};

using MetaProgress = std::function<void(const MetaState&)>;

/// Builds the task set from `sampler` and runs `cfg.iterations` meta-iterations.
MetaState meta_train(Environment& env, const TaskSampler& sampler, const SacHyper& hyper, const MetaConfig& cfg,
                     std::uint64_t seed, const MetaProgress& progress = {});

/// Continues training an existing state for `iterations` more meta-iterations.
void meta_train_more(MetaState& state, Environment& env, const MetaConfig& cfg, int iterations,
                     const MetaProgress& progress = {});

/// Meta-adaptation: starts from the global parameters, collects D_ada on
/// `task` and applies SAC updates at the adaptation rates.
SacAgent meta_adapt(const SacAgent& global, Environment& env, const Task& task, const MetaConfig& cfg,
                    const TrainConfig& budget, Rng& rng);

void write_meta_state(std::ostream& out, const MetaState& state);
/// Restores parameters, optimizer moments and the task manifest. Task buffers
/// are not persisted and come back empty.
MetaState read_meta_state(std::istream& in, std::size_t buffer_capacity);

void save_meta_checkpoint(const std::filesystem::path& path, const MetaState& state);
MetaState load_meta_checkpoint(const std::filesystem::path& path, std::size_t buffer_capacity);

}  // namespace uavvlc
