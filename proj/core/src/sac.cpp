#include "uavvlc/sac.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavvlc {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

ArrayXXd softplus(const ArrayXXd& x) {
  return x.max(0.0) + (-x.abs()).exp().log1p();
}

// log(1 - tanh(u)^2) without cancellation.
ArrayXXd log_tanh_jacobian(const ArrayXXd& u) {
  return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

MatrixXd critic_input(const MatrixXd& obs, const MatrixXd& action) {
  MatrixXd x(obs.rows() + action.rows(), obs.cols());
  x << obs, action;
  return x;
}

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

}  // namespace

void SacHyper::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::range_error("discount must be in (0, 1]");
  if (!(entropy_weight >= 0.0)) throw std::range_error("entropy weight must be >= 0");
  if (!(target_smoothing >= 0.0 && target_smoothing <= 1.0)) {
    throw std::range_error("target smoothing coefficient must be in [0, 1]");
  }
  if (batch_size < 1) throw std::range_error("batch size must be >= 1");
  for (double lr : {lr_actor, lr_critic1, lr_critic2}) adam(lr).validate();
  for (int h : hidden) {
    if (h < 1) throw std::range_error("hidden layer sizes must be positive");
  }
  if (!(log_std_min < log_std_max)) throw std::range_error("log std bounds must satisfy min < max");
  if (!(reward_scale > 0.0)) throw std::range_error("reward scale must be positive");
  if (!std::isfinite(reward_shift)) throw std::range_error("reward shift must be finite");
}

SacNetworks make_networks(int obs_dim, int act_dim, const std::vector<int>& hidden, Rng& rng) {
  if (obs_dim < 1 || act_dim < 1) throw std::invalid_argument("make_networks: dimensions must be positive");
  SacNetworks n;
  n.actor = Mlp(layer_sizes(obs_dim, hidden, 2 * act_dim));
  n.critic1 = Mlp(layer_sizes(obs_dim + act_dim, hidden, 1));
  n.critic2 = Mlp(layer_sizes(obs_dim + act_dim, hidden, 1));
  n.actor.initialize(rng);
  n.critic1.initialize(rng);
  n.critic2.initialize(rng);
  n.target_actor = n.actor;
  n.target_critic1 = n.critic1;
  n.target_critic2 = n.critic2;
  return n;
}

MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = nd(rng);
  }
  return z;
}

PolicyOutput policy_forward(const Mlp& actor, const MatrixXd& obs, const MatrixXd& noise, const SacHyper& hyper) {
  const Eigen::Index act_dim = actor.output_dim() / 2;
  if (noise.rows() != act_dim || noise.cols() != obs.cols()) {
    throw std::invalid_argument("policy_forward: noise shape mismatch");
  }
  PolicyOutput p;
  const MatrixXd head = actor.forward(obs, p.cache);
  p.mean = head.topRows(act_dim);
  p.pre_clamp = head.bottomRows(act_dim);
  const double half_span = 0.5 * (hyper.log_std_max - hyper.log_std_min);
  p.log_std = (hyper.log_std_min + half_span * (p.pre_clamp.array().tanh() + 1.0)).matrix();
  p.noise = noise;
  p.pre_tanh = (p.mean.array() + p.log_std.array().exp() * noise.array()).matrix();
  p.action = p.pre_tanh.array().tanh().matrix();
  const ArrayXXd per_dim = -0.5 * noise.array().square() - p.log_std.array() - kHalfLog2Pi -
                           log_tanh_jacobian(p.pre_tanh.array());
  p.log_prob = per_dim.colwise().sum().transpose();
  return p;
}

PolicySample policy_sample(const Mlp& actor, const VectorXd& obs, Rng& rng, const SacHyper& hyper,
                           bool deterministic) {
  const Eigen::Index act_dim = actor.output_dim() / 2;
  const MatrixXd noise = deterministic ? MatrixXd::Zero(act_dim, 1) : standard_normal(act_dim, 1, rng);
  const PolicyOutput p = policy_forward(actor, obs, noise, hyper);
  return {p.action.col(0), p.log_prob(0)};
}

VectorXd critic_target(const Batch& batch, const SacNetworks& nets, const SacHyper& hyper,
                       const MatrixXd& next_noise) {
  const Mlp& policy = hyper.target_actor_bootstrap ? nets.target_actor : nets.actor;
  const PolicyOutput next = policy_forward(policy, batch.next_obs, next_noise, hyper);
  const MatrixXd x = critic_input(batch.next_obs, next.action);
  const VectorXd q1 = nets.target_critic1.forward(x).row(0).transpose();
  const VectorXd q2 = nets.target_critic2.forward(x).row(0).transpose();
  const VectorXd soft_value = q1.cwiseMin(q2) - hyper.entropy_weight * next.log_prob;
  return (hyper.reward_scale * (batch.reward.array() + hyper.reward_shift) +
          hyper.gamma * (1.0 - batch.done.array()) * soft_value.array()).matrix();
}

double critic_loss(const Mlp& critic, const Batch& batch, const VectorXd& y, VectorXd* grad) {
  const auto n = static_cast<double>(batch.size());
  Mlp::Cache cache;
  const VectorXd q = critic.forward(critic_input(batch.obs, batch.action), cache).row(0).transpose();
  const VectorXd err = q - y;
  if (grad != nullptr) {
    const MatrixXd d = (2.0 / n) * err.transpose();
    critic.backward(cache, d, *grad);
  }
  return err.squaredNorm() / n;
}

double actor_loss(const Mlp& actor, const Mlp& critic1, const Mlp& critic2, const MatrixXd& obs,
                  const MatrixXd& noise, const SacHyper& hyper, VectorXd* grad) {
  const auto n = static_cast<double>(obs.cols());
  const double lambda = hyper.entropy_weight;
  const PolicyOutput p = policy_forward(actor, obs, noise, hyper);
  const MatrixXd x = critic_input(obs, p.action);
  Mlp::Cache c1_cache, c2_cache;
  const VectorXd q1 = critic1.forward(x, c1_cache).row(0).transpose();
  const VectorXd q2 = critic2.forward(x, c2_cache).row(0).transpose();
  const VectorXd q_min = q1.cwiseMin(q2);
  const double loss = (lambda * p.log_prob - q_min).sum() / n;
  if (grad == nullptr) return loss;

  // dL/dQ_min = -1/n, routed to whichever critic attains the minimum (ties -> critic 1).
  const Eigen::Index act_dim = p.action.rows();
  MatrixXd g1 = MatrixXd::Zero(1, obs.cols());
  MatrixXd g2 = MatrixXd::Zero(1, obs.cols());
  for (Eigen::Index j = 0; j < obs.cols(); ++j) {
    (q1(j) <= q2(j) ? g1 : g2)(0, j) = -1.0 / n;
  }
  VectorXd scratch1 = VectorXd::Zero(critic1.parameter_count());
  VectorXd scratch2 = VectorXd::Zero(critic2.parameter_count());
  const MatrixXd dx = critic1.backward(c1_cache, g1, scratch1) + critic2.backward(c2_cache, g2, scratch2);
  const ArrayXXd dq_da = dx.bottomRows(act_dim).array();

  const ArrayXXd a = p.action.array();
  const ArrayXXd sigma = p.log_std.array().exp();
  // Entropy term: d(-log(1 - tanh^2 u))/du = 2 tanh u; d/d(log std) directly = -1.
  const ArrayXXd d_u = (lambda / n) * 2.0 * a + dq_da * (1.0 - a.square());
  const ArrayXXd d_log_std = -lambda / n + d_u * sigma * p.noise.array();
  const double half_span = 0.5 * (hyper.log_std_max - hyper.log_std_min);
  const ArrayXXd d_pre_clamp = d_log_std * half_span * (1.0 - p.pre_clamp.array().tanh().square());

  MatrixXd d_head(2 * act_dim, obs.cols());
  d_head << d_u.matrix(), d_pre_clamp.matrix();
  actor.backward(p.cache, d_head, *grad);
  return loss;
}

SacGradients SacGradients::zeros_like(const SacNetworks& nets) {
  SacGradients g;
  g.actor = VectorXd::Zero(nets.actor.parameter_count());
  g.critic1 = VectorXd::Zero(nets.critic1.parameter_count());
  g.critic2 = VectorXd::Zero(nets.critic2.parameter_count());
  return g;
}

SacGradients& SacGradients::operator+=(const SacGradients& other) {
  actor += other.actor;
  critic1 += other.critic1;
  critic2 += other.critic2;
  actor_loss += other.actor_loss;
  critic1_loss += other.critic1_loss;
  critic2_loss += other.critic2_loss;
  return *this;
}

SacGradients sac_gradients(const SacNetworks& nets, const Batch& batch, Rng& rng, const SacHyper& hyper) {
  if (batch.size() == 0) throw std::invalid_argument("sac_gradients: empty batch");
  const int act_dim = nets.action_dim();
  const MatrixXd next_noise = standard_normal(act_dim, batch.size(), rng);
  const MatrixXd noise = standard_normal(act_dim, batch.size(), rng);
  SacGradients g = SacGradients::zeros_like(nets);
  const VectorXd y = critic_target(batch, nets, hyper, next_noise);
  g.critic1_loss = critic_loss(nets.critic1, batch, y, &g.critic1);
  g.critic2_loss = critic_loss(nets.critic2, batch, y, &g.critic2);
  g.actor_loss = actor_loss(nets.actor, nets.critic1, nets.critic2, batch.obs, noise, hyper, &g.actor);
  return g;
}

SacOptimizers SacOptimizers::zeros_like(const SacNetworks& nets) {
  return {AdamState::zeros(nets.actor.parameter_count()), AdamState::zeros(nets.critic1.parameter_count()),
          AdamState::zeros(nets.critic2.parameter_count())};
}

SacAgent::SacAgent(int obs_dim, int act_dim, SacHyper hyper, Rng& init_rng) : hyper_(std::move(hyper)) {
  hyper_.validate();
  nets_ = make_networks(obs_dim, act_dim, hyper_.hidden, init_rng);
  opt_ = SacOptimizers::zeros_like(nets_);
}

SacAgent::SacAgent(SacNetworks nets, SacHyper hyper) : nets_(std::move(nets)), hyper_(std::move(hyper)) {
  hyper_.validate();
  opt_ = SacOptimizers::zeros_like(nets_);
}

PolicySample SacAgent::act(const VectorXd& obs, Rng& rng, bool deterministic) const {
  return policy_sample(nets_.actor, obs, rng, hyper_, deterministic);
}

std::pair<double, double> SacAgent::update_critics(const Batch& batch, Rng& rng) {
  const MatrixXd next_noise = standard_normal(nets_.action_dim(), batch.size(), rng);
  const VectorXd y = critic_target(batch, nets_, hyper_, next_noise);
  VectorXd g1 = VectorXd::Zero(nets_.critic1.parameter_count());
  VectorXd g2 = VectorXd::Zero(nets_.critic2.parameter_count());
  const double l1 = critic_loss(nets_.critic1, batch, y, &g1);
  const double l2 = critic_loss(nets_.critic2, batch, y, &g2);
  adam_step(nets_.critic1.parameters(), g1, opt_.critic1, hyper_.adam(hyper_.lr_critic1));
  adam_step(nets_.critic2.parameters(), g2, opt_.critic2, hyper_.adam(hyper_.lr_critic2));
  soft_update(nets_.target_critic1, nets_.critic1, hyper_.target_smoothing);
  soft_update(nets_.target_critic2, nets_.critic2, hyper_.target_smoothing);
  return {l1, l2};
}

double SacAgent::update_actor(const Batch& batch, Rng& rng) {
  const MatrixXd noise = standard_normal(nets_.action_dim(), batch.size(), rng);
  VectorXd g = VectorXd::Zero(nets_.actor.parameter_count());
  const double loss = actor_loss(nets_.actor, nets_.critic1, nets_.critic2, batch.obs, noise, hyper_, &g);
  adam_step(nets_.actor.parameters(), g, opt_.actor, hyper_.adam(hyper_.lr_actor));
  soft_update(nets_.target_actor, nets_.actor, hyper_.target_smoothing);
  ++updates_;
  return loss;
}

SacGradients SacAgent::update(const Batch& batch, Rng& rng) {
  SacGradients g = sac_gradients(nets_, batch, rng, hyper_);
  apply_gradients(g);
  return g;
}

void SacAgent::apply_gradients(const SacGradients& g) {
  adam_step(nets_.actor.parameters(), g.actor, opt_.actor, hyper_.adam(hyper_.lr_actor));
  adam_step(nets_.critic1.parameters(), g.critic1, opt_.critic1, hyper_.adam(hyper_.lr_critic1));
  adam_step(nets_.critic2.parameters(), g.critic2, opt_.critic2, hyper_.adam(hyper_.lr_critic2));
  soft_update_targets();
  ++updates_;
}

void SacAgent::soft_update_targets() {
  soft_update(nets_.target_actor, nets_.actor, hyper_.target_smoothing);
  soft_update(nets_.target_critic1, nets_.critic1, hyper_.target_smoothing);
  soft_update(nets_.target_critic2, nets_.critic2, hyper_.target_smoothing);
}

void SacAgent::reset_optimizers() { opt_ = SacOptimizers::zeros_like(nets_); }

}  // namespace uavvlc
