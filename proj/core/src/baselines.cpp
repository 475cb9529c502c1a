#include "uavvlc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "uavvlc/training.hpp"

namespace uavvlc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void GreedyConfig::validate() const {
  if (!(sinr_margin >= 0.0 && order_margin >= 0.0)) throw std::range_error("greedy margins must be >= 0");
  if (!(altitude_floor >= 0.0)) throw std::range_error("greedy altitude floor must be >= 0");
  if (!(fov_fill > 0.0 && fov_fill <= 1.0)) throw std::range_error("greedy FOV fill must be in (0, 1]");
  if (max_iterations < 1) throw std::range_error("greedy iteration limit must be >= 1");
}

LadderResult noma_power_ladder(const MatrixXd& g_lo, const MatrixXd& g_hi, std::span<const int> order,
                               double sinr_target, const VectorXd& noise_var, double order_margin,
                               const std::function<double(const VectorXd&)>& cap_scale, int max_iterations) {
  const auto k_users = static_cast<Eigen::Index>(order.size());
  if (g_lo.rows() != k_users || g_lo.cols() != k_users || g_hi.rows() != k_users || g_hi.cols() != k_users ||
      noise_var.size() != k_users) {
    throw std::invalid_argument("noma_power_ladder: dimension mismatch");
  }
  LadderResult res;
  for (int u : order) {
    if (!(g_lo(u, u) > 0.0)) {
      // Some user cannot be reached at all: spread the cap evenly.
      const VectorXd ones = VectorXd::Ones(k_users);
      res.amplitude = ones * std::min(1.0, cap_scale(ones));
      return res;
    }
  }

  VectorXd p = VectorXd::Zero(k_users);
  for (int it = 0; it < max_iterations; ++it) {
    VectorXd next = p;
    for (Eigen::Index j = k_users; j-- > 0;) {
      const int u = order[static_cast<std::size_t>(j)];
      double interference = 0.0;
      for (Eigen::Index q = j + 1; q < k_users; ++q) {
        const int v = order[static_cast<std::size_t>(q)];
        const double c = next(v) * g_hi(u, v);
        interference += c * c;
      }
      double need = std::sqrt(sinr_target * (interference + noise_var(u))) / g_lo(u, u);
      if (j > 0) {
        const int prev = order[static_cast<std::size_t>(j - 1)];
        need = std::max(need, (1.0 + order_margin) * next(prev) * g_hi(prev, prev) / g_lo(u, u));
      }
      next(u) = std::max(next(u), need);
    }
    const double scale = cap_scale(next);
    if (scale < 1.0) {
      res.amplitude = next * scale;
      return res;
    }
    const double change = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (change <= 1e-13 * p.cwiseAbs().maxCoeff()) {
      res.amplitude = p;
      res.feasible = true;
      return res;
    }
  }
  res.amplitude = p;
  return res;
}

MatrixXd greedy_directions(const MatrixXd& est_gain, const LedSelection& leds) {
  if (est_gain.rows() != leds.size()) throw std::invalid_argument("greedy_directions: LED count mismatch");
  const VectorXd mask = leds.mask();
  const double n_active = mask.sum();
  MatrixXd d = mask.asDiagonal() * est_gain;
  for (Eigen::Index k = 0; k < d.cols(); ++k) {
    const double s = d.col(k).sum();
    if (s > 0.0) {
      d.col(k) /= s;
    } else if (n_active > 0.0) {
      d.col(k) = mask / n_active;
    }
  }
  return d;
}

std::vector<int> greedy_order(const ChannelState& channels, const LedSelection& leds) {
  const MatrixXd d = greedy_directions(channels.est_gain, leds);
  const MatrixXd g = channels.est_gain.transpose() * d;
  std::vector<int> order(static_cast<std::size_t>(g.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g(a, a) < g(b, b); });
  return order;
}

BeamPlan greedy_beams(const ChannelState& channels, const LedSelection& leds, double i_dc, double propulsion,
                      const SystemModel& model, std::span<const int> order, const GreedyConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = channels.est_gain.rows();
  const Eigen::Index k = channels.est_gain.cols();
  BeamPlan plan;
  plan.order.assign(order.begin(), order.end());
  plan.beam.w = MatrixXd::Zero(n, k);

  const double bound = beamforming_bound(i_dc, model.dimming.i_low, model.dimming.i_high);
  const double non_beam = model.power.conversion_factor * leds.active_count() * i_dc + model.power.circuit_power +
                          propulsion;
  const double budget = (model.qos.p_max - non_beam) * (1.0 - 1e-12);
  if (!(budget > 0.0) || !(bound > 0.0) || leds.active_count() == 0) return plan;

  const MatrixXd d = greedy_directions(channels.est_gain, leds);
  const double delta = channels.uncertainty_radius;
  const MatrixXd g_lo = (channels.est_gain.array() - delta).cwiseMax(0.0).matrix().transpose() * d;
  const MatrixXd g_hi = (channels.est_gain.array() + delta).matrix().transpose() * d;
  const double target = (std::exp2(model.qos.r_min) - 1.0) * (1.0 + cfg.sinr_margin);
  const double zeta = model.power.amp_efficiency;

  const auto cap_scale = [&](const VectorXd& p) {
    const VectorXd rows = d * p;
    const double peak = rows.maxCoeff();
    const double total = rows.sum();
    double s = std::numeric_limits<double>::infinity();
    if (peak > 0.0) s = std::min(s, bound / peak);
    if (total > 0.0 && zeta > 0.0) s = std::min(s, budget / (zeta * total));
    return s;
  };
  const LadderResult ladder =
      noma_power_ladder(g_lo, g_hi, order, target, channels.noise_var, cfg.order_margin, cap_scale, cfg.max_iterations);
  plan.beam = project_beamformer(d * ladder.amplitude.asDiagonal(), bound, leds);
  plan.certified = ladder.feasible;
  return plan;
}

namespace {

Vec3 steer(const Vec3& pos, const Vec3& vel, const Vec3& target, const FlightConfig& f) {
  const Vec3 gap = target - pos;
  const double dist = gap.norm();
  Vec3 desired = Vec3::Zero();
  if (dist > 1e-12) {
    const double speed =
        std::min({f.v_max, std::sqrt(2.0 * f.a_max * dist), dist / f.slot_duration});
    desired = gap / dist * speed;
  }
  return clamp_velocity(vel, desired, f);
}

bool lands_home(Vec3 pos, Vec3 vel, int steps, const Vec3& home, const FlightConfig& f, double tol) {
  for (int i = 0; i < steps; ++i) {
    vel = steer(pos, vel, home, f);
    pos += vel * f.slot_duration;
  }
  return (pos - home).norm() <= tol;
}

}  // namespace

Vec3 greedy_velocity(const UavState& uav, std::span<const Position> users, const SystemModel& model,
                     const GreedyConfig& cfg) {
  const FlightConfig& f = model.flight;
  const int remaining = f.n_slots - uav.slot;
  if (remaining <= 0 || users.empty()) return Vec3::Zero();

  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const Position& u : users) centroid += Eigen::Vector2d(u.x, u.y);
  centroid /= static_cast<double>(users.size());
  double reach = 0.0;
  for (const Position& u : users) reach = std::max(reach, (Eigen::Vector2d(u.x, u.y) - centroid).norm());
  const double half_angle = std::min(model.optics.fov_semiangle, model.optics.half_power_semiangle) * cfg.fov_fill;
  double altitude = model.receiver.user_height + std::max(cfg.altitude_floor, reach / std::tan(half_angle));

  const Vec3 lo = f.q_min.vec();
  const Vec3 hi = f.q_max.vec();
  const Vec3 inset = ((hi - lo) * 0.25).cwiseMin(Vec3::Constant(5.0));
  altitude = std::clamp(altitude, lo.z() + inset.z(), hi.z() - inset.z());
  const Vec3 target(std::clamp(centroid.x(), lo.x() + inset.x(), hi.x() - inset.x()),
                    std::clamp(centroid.y(), lo.y() + inset.y(), hi.y() - inset.y()), altitude);

  const Vec3 pos = uav.position.vec();
  const Vec3 home = f.q_init.vec();
  const Vec3 go = steer(pos, uav.velocity, target, f);
  if (lands_home(pos + go * f.slot_duration, go, remaining - 1, home, f, 0.5 * f.return_tolerance)) return go;
  return steer(pos, uav.velocity, home, f);
}

AllocationAction greedy_action(const Environment& env, const GreedyConfig& cfg) {
  const SystemModel& model = env.episode_model();
  const ChannelState& ch = env.channels();
  const int n = model.dimming.n_leds;
  AllocationAction act;
  const int n_active = active_led_count(model.dimming.eta, n);
  act.i_dc = dc_bias_for(model.dimming, n_active);
  const VectorXd scores = ch.est_gain.rowwise().sum();
  act.leds = select_leds(std::span<const double>(scores.data(), static_cast<std::size_t>(n)), n_active);
  act.velocity = greedy_velocity(env.uav(), env.task().users, model, cfg);
  const std::vector<int> order = greedy_order(ch, act.leds);
  act.beam = greedy_beams(ch, act.leds, act.i_dc, propulsion_power(act.velocity, model.rotor), model, order, cfg).beam;
  return act;
}

AllocationAction greedy_exhaustive_action(const ChannelState& channels, const UavState& uav, const Vec3& velocity,
                                          const SystemModel& model, const GreedyConfig& cfg) {
  const int n = model.dimming.n_leds;
  const auto k = static_cast<int>(channels.est_gain.cols());
  const int n_active = active_led_count(model.dimming.eta, n);
  const double i_dc = dc_bias_for(model.dimming, n_active);
  const double prop = propulsion_power(velocity, model.rotor);

  std::vector<std::uint8_t> pattern(static_cast<std::size_t>(n), 0);
  std::fill(pattern.begin(), pattern.begin() + n_active, 1);
  AllocationAction best;
  double best_power = std::numeric_limits<double>::infinity();
  do {
    LedSelection leds{pattern};
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    do {
      AllocationAction cand{greedy_beams(channels, leds, i_dc, prop, model, order, cfg).beam, leds, i_dc, velocity};
      const SlotEvaluation ev = evaluate_slot(cand, channels, uav, model);
      if (ev.feasibility.all() && ev.power.total < best_power) {
        best_power = ev.power.total;
        best = std::move(cand);
      }
    } while (std::next_permutation(order.begin(), order.end()));
  } while (std::prev_permutation(pattern.begin(), pattern.end()));

  if (std::isfinite(best_power)) return best;
  AllocationAction fallback;
  fallback.i_dc = i_dc;
  fallback.velocity = velocity;
  const VectorXd scores = channels.est_gain.rowwise().sum();
  fallback.leds = select_leds(std::span<const double>(scores.data(), static_cast<std::size_t>(n)), n_active);
  fallback.beam = greedy_beams(channels, fallback.leds, i_dc, prop, model, greedy_order(channels, fallback.leds),
                               cfg).beam;
  return fallback;
}

EpisodeTrace baseline_random(Environment& env, const Task& task, Rng& rng) {
  const int dim = env.action_dim();
  return rollout(env, task, [&](const VectorXd&) { return uniform_action(dim, rng); });
}

EpisodeTrace baseline_greedy(Environment& env, const Task& task, const GreedyConfig& cfg) {
  env.reset(task);
  while (!env.done()) env.apply(greedy_action(env, cfg));
  return env.trace();
}

}  // namespace uavvlc
