#include "uavvlc/training.hpp"

#include <stdexcept>

namespace uavvlc {

EpisodeTrace rollout(Environment& env, const Task& task, const PolicyFn& policy, ReplayBuffer* sink) {
  Eigen::VectorXd obs = env.reset(task);
  while (!env.done()) {
    Transition t = env.step(policy(obs));
    obs = t.next_obs;
    if (sink != nullptr) sink->push(std::move(t));
  }
  return env.trace();
}

Eigen::VectorXd uniform_action(int dim, Rng& rng) {
  Eigen::VectorXd a(dim);
  for (int i = 0; i < dim; ++i) a(i) = uniform(rng, -1.0, 1.0);
  return a;
}

void TrainConfig::validate() const {
  if (episodes < 0) throw std::range_error("training episodes must be >= 0");
  if (warmup_steps < 0) throw std::range_error("warmup steps must be >= 0");
  if (updates_per_step < 0) throw std::range_error("updates per step must be >= 0");
  if (min_buffer < 0) throw std::range_error("minimum buffer fill must be >= 0");
  if (buffer_capacity == 0) throw std::range_error("buffer capacity must be positive");
}

TrainingLog train_sac(SacAgent& agent, Environment& env, const TaskSampler& tasks, const TrainConfig& cfg,
                      ReplayBuffer& buffer, Rng& rng) {
  cfg.validate();
  const auto batch = static_cast<std::size_t>(agent.hyper().batch_size);
  const std::size_t min_fill = cfg.min_buffer > 0 ? static_cast<std::size_t>(cfg.min_buffer) : batch;
  TrainingLog log;
  long long steps = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const Task task = tasks(rng);
    Eigen::VectorXd obs = env.reset(task);
    while (!env.done()) {
      const Eigen::VectorXd action =
          steps < cfg.warmup_steps ? uniform_action(env.action_dim(), rng) : agent.act(obs, rng).action;
      Transition t = env.step(action);
      obs = t.next_obs;
      buffer.push(std::move(t));
      ++steps;
      if (buffer.size() >= min_fill) {
        for (int u = 0; u < cfg.updates_per_step; ++u) agent.update(buffer.sample(batch, rng), rng);
      }
    }
    log.episode_reward.push_back(env.trace().total_reward());
    log.episode_power.push_back(env.trace().mean_total_power());
    log.episode_feasible.push_back(env.trace().feasible_fraction());
  }
  return log;
}

TrainingLog train_sac(SacAgent& agent, Environment& env, const Task& task, const TrainConfig& cfg,
                      ReplayBuffer& buffer, Rng& rng) {
  return train_sac(agent, env, [&task](Rng&) { return task; }, cfg, buffer, rng);
}

EpisodeTrace run_policy(const SacAgent& agent, Environment& env, const Task& task) {
  Rng unused(0);
  return rollout(env, task, [&](const Eigen::VectorXd& obs) { return agent.act(obs, unused, true).action; });
}

}  // namespace uavvlc
