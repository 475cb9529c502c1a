#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/env.hpp"
#include "uavvlc/replay_buffer.hpp"
#include "uavvlc/sac.hpp"

namespace uavvlc {

using PolicyFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& obs)>;

/// Plays one episode of `task`; every transition is pushed into `sink` if given.
EpisodeTrace rollout(Environment& env, const Task& task, const PolicyFn& policy, ReplayBuffer* sink = nullptr);

Eigen::VectorXd uniform_action(int dim, Rng& rng);

struct TrainConfig {
  int episodes = 10;
  int warmup_steps = 0;      // uniform random actions before the policy acts
  int updates_per_step = 1;
  int min_buffer = 0;        // updates start once the buffer holds this many (0: one batch)
  std::size_t buffer_capacity = 100000;

  void validate() const;
};

struct TrainingLog {
  std::vector<double> episode_reward;
  std::vector<double> episode_power;
  std::vector<double> episode_feasible;
};

/// Off-policy SAC: act stochastically, store, update after every slot.
TrainingLog train_sac(SacAgent& agent, Environment& env, const TaskSampler& tasks, const TrainConfig& cfg,
                      ReplayBuffer& buffer, Rng& rng);
TrainingLog train_sac(SacAgent& agent, Environment& env, const Task& task, const TrainConfig& cfg,
                      ReplayBuffer& buffer, Rng& rng);

/// Greedy (mean-action) evaluation episode.
EpisodeTrace run_policy(const SacAgent& agent, Environment& env, const Task& task);

}  // namespace uavvlc
