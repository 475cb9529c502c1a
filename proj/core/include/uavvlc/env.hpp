#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/metrics.hpp"
#include "uavvlc/random.hpp"
#include "uavvlc/transition.hpp"

namespace uavvlc {

/// How infeasible slots are rewarded. `amended` pays a penalty below every
/// feasible reward; `zero_penalty` pays 0.
enum class RewardMode { amended, zero_penalty };

/// Shape of the amended penalty: a fixed value, or -(P_max + P_Tot) minus
/// optional weighted rate-shortfall and flight-violation terms.
enum class PenaltyMode { constant, power };

enum class VelocityMode { clamped, report };
enum class ObservationMode { augmented, channels_only };

struct EnvConfig {
  RewardMode reward_mode = RewardMode::amended;
  PenaltyMode penalty_mode = PenaltyMode::constant;
  std::optional<double> penalty;         // constant mode; default -(P_max + P_Hov)
  double rate_shortfall_weight = 0.0;    // W per bit/s/Hz below R_min (power mode)
  double flight_violation_weight = 0.0;  // W per violated flight constraint (power mode)
  VelocityMode velocity_mode = VelocityMode::clamped;
  ObservationMode observation_mode = ObservationMode::augmented;
  double channel_reference_distance = 50.0;  // m; gains are observed relative to nadir gain here
  double init_margin = 5.0;                  // m; q_I is drawn this far inside the flight box
};

/// One meta-learning task: a fixed user layout, take-off point and CSI seed.
struct Task {
  std::vector<Position> users;
  Position q_init;
  std::uint64_t seed = 0;
};

/// Fractions of the ground footprint users are drawn from (default: all of it).
///
/// With cluster_radius > 0 a cluster centre is drawn from the region and users
/// are scattered uniformly over a disc of that radius around it, then shifted
/// so their centroid is exactly the centre. The take-off point and the centre
/// are drawn before any user, so two tasks from the same seed that differ only
/// in K share both.
struct TaskRegion {
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  double cluster_radius = 0.0;  // m

  void validate() const;
};

Task sample_task(const SystemModel& model, Rng& rng, const TaskRegion& region = {}, double init_margin = 5.0);

using TaskSampler = std::function<Task(Rng&)>;

struct SlotRecord {
  int slot = 0;
  double reward = 0.0;
  PowerBreakdown power;
  std::vector<double> rates;
  double sum_rate = 0.0;
  double energy_efficiency = 0.0;
  FeasibilityReport feasibility;
  Position position;
  Vec3 velocity = Vec3::Zero();
};

struct EpisodeTrace {
  std::vector<SlotRecord> slots;

  double mean_total_power() const;
  double mean_sum_rate() const;
  double mean_energy_efficiency() const;
  double feasible_fraction() const;
  double total_reward() const;
};

/// Slotted MDP over the joint beamforming / LED selection / trajectory problem.
///
/// Raw actions are laid out as [N*K beam pre-image (column-major W) | N LED
/// scores | 3 velocity pre-image], all in [-1, 1].
class Environment {
 public:
  explicit Environment(SystemModel model, EnvConfig cfg = {});

  const SystemModel& model() const { return model_; }
  const EnvConfig& config() const { return cfg_; }
  int observation_dim() const;
  int action_dim() const;

  Eigen::VectorXd reset(const Task& task);
  AllocationAction decode_action(const Eigen::VectorXd& raw) const;

  /// Decodes and applies a raw action. Throws std::logic_error once done.
  Transition step(const Eigen::VectorXd& raw);
  /// Applies an already-decoded action (baselines use this directly).
  const SlotRecord& apply(const AllocationAction& action);

  bool done() const { return uav_.slot >= model_.flight.n_slots; }
  Eigen::VectorXd observe() const;
  double reward_for(const SlotEvaluation& ev) const;

  const Task& task() const { return task_; }
  const UavState& uav() const { return uav_; }
  const ChannelState& channels() const { return channels_; }
  /// Model whose flight config carries this task's take-off point.
  const SystemModel& episode_model() const { return episode_model_; }
  const EpisodeTrace& trace() const { return trace_; }
  double channel_reference_gain() const { return h_ref_; }

 private:
  void refresh_channels();

  SystemModel model_;
  EnvConfig cfg_;
  SystemModel episode_model_;
  Task task_;
  UavState uav_;
  ChannelState channels_;
  EpisodeTrace trace_;
  Rng csi_rng_;
  double h_ref_ = 1.0;
  double hover_total_ = 0.0;
  bool has_task_ = false;
};

}  // namespace uavvlc
