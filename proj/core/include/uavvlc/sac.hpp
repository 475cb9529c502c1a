#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/adam.hpp"
#include "uavvlc/mlp.hpp"
#include "uavvlc/random.hpp"
#include "uavvlc/replay_buffer.hpp"

namespace uavvlc {

struct SacHyper {
  double gamma = 0.99;
  double entropy_weight = 0.2;      // lambda
  double target_smoothing = 0.005;  // Polyak coefficient
  int batch_size = 64;
  double lr_actor = 3e-4;
  double lr_critic1 = 3e-4;
  double lr_critic2 = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::vector<int> hidden = {64, 64};
  double log_std_min = -5.0;
  double log_std_max = 1.0;
  bool target_actor_bootstrap = false;  // draw a' from the target actor
  double reward_scale = 1.0;            // critic targets see reward_scale * (r + reward_shift)
  double reward_shift = 0.0;

  void validate() const;
  AdamConfig adam(double learning_rate) const {
    return {learning_rate, adam_beta1, adam_beta2, adam_epsilon};
  }
};

/// Actor, twin critics and their target copies.
struct SacNetworks {
  Mlp actor;   // obs -> [mean | pre-clamp log std]
  Mlp critic1; // [obs ; action] -> Q
  Mlp critic2;
  Mlp target_actor;
  Mlp target_critic1;
  Mlp target_critic2;

  int observation_dim() const { return actor.input_dim(); }
  int action_dim() const { return actor.output_dim() / 2; }
};

SacNetworks make_networks(int obs_dim, int act_dim, const std::vector<int>& hidden, Rng& rng);

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Batched squashed-Gaussian policy evaluated at fixed noise.
struct PolicyOutput {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;  // after the smooth clamp
  Eigen::MatrixXd pre_clamp;
  Eigen::MatrixXd noise;
  Eigen::MatrixXd pre_tanh;  // u = mean + std * noise
  Eigen::MatrixXd action;    // tanh(u)
  Eigen::VectorXd log_prob;  // includes the tanh change of variables
  Mlp::Cache cache;
};

PolicyOutput policy_forward(const Mlp& actor, const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise,
                            const SacHyper& hyper);

struct PolicySample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

/// Samples a = tanh(mean + std * xi); deterministic mode uses xi = 0.
PolicySample policy_sample(const Mlp& actor, const Eigen::VectorXd& obs, Rng& rng, const SacHyper& hyper,
                           bool deterministic = false);

/// Soft Bellman target r + gamma (1 - done) [min Q'(s', a') - lambda log pi(a'|s')],
/// with a' drawn at the supplied noise.
Eigen::VectorXd critic_target(const Batch& batch, const SacNetworks& nets, const SacHyper& hyper,
                              const Eigen::MatrixXd& next_noise);

/// Mean squared error to y; adds d/dparams into *grad when non-null.
double critic_loss(const Mlp& critic, const Batch& batch, const Eigen::VectorXd& y, Eigen::VectorXd* grad);

/// mean(lambda log pi(a|s) - min(Q1, Q2)(s, a)) with reparameterised a; adds
/// d/d(actor params) into *grad when non-null.
double actor_loss(const Mlp& actor, const Mlp& critic1, const Mlp& critic2, const Eigen::MatrixXd& obs,
                  const Eigen::MatrixXd& noise, const SacHyper& hyper, Eigen::VectorXd* grad);

struct SacGradients {
  Eigen::VectorXd actor;
  Eigen::VectorXd critic1;
  Eigen::VectorXd critic2;
  double actor_loss = 0.0;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;

  static SacGradients zeros_like(const SacNetworks& nets);
  SacGradients& operator+=(const SacGradients& other);
};

/// All three loss gradients evaluated at one parameter snapshot.
SacGradients sac_gradients(const SacNetworks& nets, const Batch& batch, Rng& rng, const SacHyper& hyper);

struct SacOptimizers {
  AdamState actor;
  AdamState critic1;
  AdamState critic2;

  static SacOptimizers zeros_like(const SacNetworks& nets);
};

class SacAgent {
 public:
  SacAgent(int obs_dim, int act_dim, SacHyper hyper, Rng& init_rng);
  SacAgent(SacNetworks nets, SacHyper hyper);

  const SacHyper& hyper() const { return hyper_; }
  SacHyper& hyper() { return hyper_; }
  const SacNetworks& networks() const { return nets_; }
  SacNetworks& networks() { return nets_; }
  const SacOptimizers& optimizers() const { return opt_; }
  SacOptimizers& optimizers() { return opt_; }
  std::int64_t update_count() const { return updates_; }
  void set_update_count(std::int64_t n) { updates_ = n; }

  PolicySample act(const Eigen::VectorXd& obs, Rng& rng, bool deterministic = false) const;

  /// One ADAM step on each critic, then Polyak update of the target critics.
  std::pair<double, double> update_critics(const Batch& batch, Rng& rng);
  /// One ADAM step on the actor, then Polyak update of the target actor.
  double update_actor(const Batch& batch, Rng& rng);
  /// Critics and actor stepped from gradients taken at the same snapshot.
  SacGradients update(const Batch& batch, Rng& rng);

  /// ADAM steps with precomputed gradients plus all Polyak updates.
  void apply_gradients(const SacGradients& g);
  void soft_update_targets();
  void reset_optimizers();

 private:
  SacNetworks nets_;
  SacHyper hyper_;
  SacOptimizers opt_;
  std::int64_t updates_ = 0;
};

}  // namespace uavvlc
