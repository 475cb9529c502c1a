#include "uavvlc/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace uavvlc {

void TaskRegion::validate() const {
  const auto unit = [](double lo, double hi) { return lo >= 0.0 && lo <= hi && hi <= 1.0; };
  if (!unit(x_lo, x_hi) || !unit(y_lo, y_hi)) throw std::range_error("task region fractions must satisfy 0 <= lo <= hi <= 1");
  if (!(cluster_radius >= 0.0)) throw std::range_error("cluster radius must be >= 0");
}

Task sample_task(const SystemModel& model, Rng& rng, const TaskRegion& region, double init_margin) {
  region.validate();
  const auto& f = model.flight;
  Task task;
  const auto inner = [&](double lo, double hi) {
    const double m = std::min(init_margin, 0.25 * (hi - lo));
    return uniform(rng, lo + m, hi - m);
  };
  task.q_init = {inner(f.q_min.x, f.q_max.x), inner(f.q_min.y, f.q_max.y), inner(f.q_min.z, f.q_max.z)};

  const double span_x = f.q_max.x - f.q_min.x;
  const double span_y = f.q_max.y - f.q_min.y;
  const auto in_region = [&] {
    return Eigen::Vector2d(f.q_min.x + span_x * uniform(rng, region.x_lo, region.x_hi),
                           f.q_min.y + span_y * uniform(rng, region.y_lo, region.y_hi));
  };
  std::vector<Eigen::Vector2d> xy;
  if (region.cluster_radius > 0.0) {
    const Eigen::Vector2d centre = in_region();
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int k = 0; k < model.n_users; ++k) {
      const double r = region.cluster_radius * std::sqrt(uniform(rng, 0.0, 1.0));
      const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      xy.emplace_back(r * std::cos(a), r * std::sin(a));
      mean += xy.back();
    }
    mean /= static_cast<double>(model.n_users);
    for (auto& p : xy) p += centre - mean;
  } else {
    for (int k = 0; k < model.n_users; ++k) xy.push_back(in_region());
  }
  for (const auto& p : xy) task.users.push_back({p.x(), p.y(), model.receiver.user_height});
  task.seed = rng();
  return task;
}

namespace {

template <class Fn>
double mean_of(const std::vector<SlotRecord>& slots, Fn fn) {
  if (slots.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : slots) s += fn(r);
  return s / static_cast<double>(slots.size());
}

}  // namespace

double EpisodeTrace::mean_total_power() const {
  return mean_of(slots, [](const SlotRecord& r) { return r.power.total; });
}
double EpisodeTrace::mean_sum_rate() const {
  return mean_of(slots, [](const SlotRecord& r) { return r.sum_rate; });
}
double EpisodeTrace::mean_energy_efficiency() const {
  return mean_of(slots, [](const SlotRecord& r) { return r.energy_efficiency; });
}
double EpisodeTrace::feasible_fraction() const {
  return mean_of(slots, [](const SlotRecord& r) { return r.feasibility.all() ? 1.0 : 0.0; });
}
double EpisodeTrace::total_reward() const {
  double s = 0.0;
  for (const auto& r : slots) s += r.reward;
  return s;
}

Environment::Environment(SystemModel model, EnvConfig cfg)
    : model_(std::move(model)), cfg_(cfg), episode_model_(model_) {
  model_.validate();
  const auto& o = model_.optics;
  const double m = lambertian_order(o.half_power_semiangle);
  const double d = cfg_.channel_reference_distance;
  h_ref_ = (m + 1.0) * o.pd_area / (2.0 * std::numbers::pi * d * d) * concentrator_gain(0.0, o);
  if (!(h_ref_ > 0.0)) throw std::invalid_argument("Environment: degenerate channel reference gain");
  hover_total_ = hover_power(model_.rotor).total;
}

int Environment::observation_dim() const {
  const int channel = model_.dimming.n_leds * model_.n_users;
  return cfg_.observation_mode == ObservationMode::augmented ? channel + 7 : channel;
}

int Environment::action_dim() const {
  const int n = model_.dimming.n_leds;
  return n * model_.n_users + n + 3;
}

Eigen::VectorXd Environment::reset(const Task& task) {
  if (static_cast<int>(task.users.size()) != model_.n_users) {
    throw std::invalid_argument("Environment::reset: task user count differs from the model");
  }
  task_ = task;
  episode_model_ = model_;
  episode_model_.flight.q_init = task.q_init;
  uav_ = UavState{task.q_init, Vec3::Zero(), 0};
  trace_ = {};
  csi_rng_.seed(task.seed);
  has_task_ = true;
  refresh_channels();
  return observe();
}

void Environment::refresh_channels() {
  const int n = model_.dimming.n_leds;
  channels_.true_gain = channel_matrix(uav_.position, task_.users, model_.optics, n);
  channels_.est_gain = perturb_csi(channels_.true_gain, model_.receiver.csi_radius, csi_rng_);
  channels_.noise_var = Eigen::VectorXd::Constant(model_.n_users, model_.receiver.noise_var);
  channels_.uncertainty_radius = model_.receiver.csi_radius;
}

Eigen::VectorXd Environment::observe() const {
  Eigen::VectorXd obs(observation_dim());
  const Eigen::Index nk = channels_.est_gain.size();
  obs.head(nk) = channels_.est_gain.reshaped() / h_ref_;
  if (cfg_.observation_mode == ObservationMode::augmented) {
    const auto& f = model_.flight;
    const Vec3 lo = f.q_min.vec();
    const Vec3 span = f.q_max.vec() - lo;
    obs.segment<3>(nk) = 2.0 * (uav_.position.vec() - lo).cwiseQuotient(span) - Vec3::Ones();
    obs.segment<3>(nk + 3) = uav_.velocity / f.v_max;
    obs(nk + 6) = static_cast<double>(uav_.slot) / f.n_slots;
  }
  return obs;
}

AllocationAction Environment::decode_action(const Eigen::VectorXd& raw) const {
  if (raw.size() != action_dim()) throw std::invalid_argument("decode_action: wrong action length");
  const int n = model_.dimming.n_leds;
  const int k = model_.n_users;
  const auto& dim = model_.dimming;

  AllocationAction act;
  const int n_active = active_led_count(dim.eta, n);
  act.i_dc = dc_bias_for(dim, n_active);
  const double bound = beamforming_bound(act.i_dc, dim.i_low, dim.i_high);

  const Eigen::VectorXd scores = raw.segment(n * k, n);
  act.leds = select_leds(std::span<const double>(scores.data(), static_cast<std::size_t>(n)), n_active);

  const Eigen::MatrixXd w_raw = raw.head(n * k).cwiseMax(-1.0).cwiseMin(1.0).reshaped(n, k) * bound;
  act.beam = project_beamformer(w_raw, bound, act.leds);

  const Vec3 v_raw = raw.tail<3>().cwiseMax(-1.0).cwiseMin(1.0);
  const auto& f = model_.flight;
  if (cfg_.velocity_mode == VelocityMode::clamped) {
    act.velocity = clamp_velocity(uav_.velocity, uav_.velocity + v_raw * f.a_max * f.slot_duration, f);
  } else {
    act.velocity = v_raw * f.v_max;
  }
  return act;
}

double Environment::reward_for(const SlotEvaluation& ev) const {
  if (ev.feasibility.all()) return -ev.power.total;
  if (cfg_.reward_mode == RewardMode::zero_penalty) return 0.0;
  if (cfg_.penalty_mode == PenaltyMode::constant) {
    return cfg_.penalty.value_or(-(model_.qos.p_max + hover_total_));
  }
  double shortfall = 0.0;
  for (double r : ev.rates.rates) shortfall += std::max(0.0, model_.qos.r_min - r);
  int flight_violations = 0;
  for (int c = 4; c <= 7; ++c) flight_violations += ev.feasibility[c] ? 0 : 1;
  return -(model_.qos.p_max + ev.power.total) - cfg_.rate_shortfall_weight * shortfall -
         cfg_.flight_violation_weight * flight_violations;
}

const SlotRecord& Environment::apply(const AllocationAction& action) {
  if (!has_task_) throw std::logic_error("Environment: reset() must be called before stepping");
  if (done()) throw std::logic_error("Environment: episode already finished");

  const SlotEvaluation ev = evaluate_slot(action, channels_, uav_, episode_model_);
  SlotRecord rec;
  rec.slot = uav_.slot;
  rec.reward = reward_for(ev);
  rec.power = ev.power;
  rec.rates = ev.rates.rates;
  rec.sum_rate = ev.rates.sum_rate;
  rec.energy_efficiency = ev.energy_efficiency;
  rec.feasibility = ev.feasibility;
  rec.position = uav_.position;
  rec.velocity = action.velocity;
  trace_.slots.push_back(std::move(rec));

  uav_ = step_kinematics(uav_, action.velocity, model_.flight);
  refresh_channels();
  return trace_.slots.back();
}

Transition Environment::step(const Eigen::VectorXd& raw) {
  Transition t;
  t.obs = observe();
  t.action = raw;
  const SlotRecord& rec = apply(decode_action(raw));
  t.reward = rec.reward;
  t.next_obs = observe();
  t.done = done();
  return t;
}

}  // namespace uavvlc
