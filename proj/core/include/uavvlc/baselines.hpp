#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/env.hpp"
#include "uavvlc/metrics.hpp"

namespace uavvlc {

/// Greedy baseline knobs. The procedure itself is not from any reference
/// design; see README for the exact rules.
struct GreedyConfig {
  double sinr_margin = 1e-6;   // relative slack on the SINR target
  double order_margin = 1e-6;  // relative slack keeping the SIC order strict
  double altitude_floor = 5.0; // m above the users
  double fov_fill = 0.95;      // fraction of the FOV semi-angle used to cover all users
  int max_iterations = 20000;

  void validate() const;
};

/// Least fixed point of the NOMA amplitude ladder.
///
/// For decoding order `order`, finds the smallest amplitudes p with
///   (p_j g_lo(j,j))^2 >= target (sum_{q after j} (p_q g_hi(j,q))^2 + noise_j)
///   p_next g_lo(next,next) >= (1 + order_margin) p_j g_hi(j,j)
/// where g_lo / g_hi bound the effective gains of unit-amplitude columns.
/// Iteration stops once the common scale allowed by `cap_scale` drops below
/// one; the last iterate is then scaled onto the cap and `feasible` is false.
struct LadderResult {
  Eigen::VectorXd amplitude;
  bool feasible = false;
};

LadderResult noma_power_ladder(const Eigen::MatrixXd& g_lo, const Eigen::MatrixXd& g_hi, std::span<const int> order,
                               double sinr_target, const Eigen::VectorXd& noise_var, double order_margin,
                               const std::function<double(const Eigen::VectorXd&)>& cap_scale, int max_iterations);

/// L1-normalised estimated-channel directions over the active LEDs (N x K).
Eigen::MatrixXd greedy_directions(const Eigen::MatrixXd& est_gain, const LedSelection& leds);

struct BeamPlan {
  Beamformer beam;
  std::vector<int> order;
  bool certified = false;  // C1 holds for every channel inside the CSI error box
};

/// Minimum-amplitude beams for a fixed LED pattern and decoding order, capped
/// by the per-LED bound and by the transmit budget left under P_max.
BeamPlan greedy_beams(const ChannelState& channels, const LedSelection& leds, double i_dc, double propulsion,
                      const SystemModel& model, std::span<const int> order, const GreedyConfig& cfg = {});

/// Decoding order by ascending estimated direct gain (ties by index).
std::vector<int> greedy_order(const ChannelState& channels, const LedSelection& leds);

/// Velocity for this slot: cruise toward the coverage point above the user
/// centroid, and turn home early enough to land within the return tolerance.
Vec3 greedy_velocity(const UavState& uav, std::span<const Position> users, const SystemModel& episode_model,
                     const GreedyConfig& cfg = {});

/// Per-slot greedy decision on the environment's current state.
AllocationAction greedy_action(const Environment& env, const GreedyConfig& cfg = {});

/// Exhaustive variant: every LED subset of size N_a and every decoding order;
/// returns the feasible candidate with least total power (or the regular greedy
/// choice when none is feasible). Intended for N <= ~12, K <= ~4.
AllocationAction greedy_exhaustive_action(const ChannelState& channels, const UavState& uav, const Vec3& velocity,
                                          const SystemModel& model, const GreedyConfig& cfg = {});

EpisodeTrace baseline_random(Environment& env, const Task& task, Rng& rng);
EpisodeTrace baseline_greedy(Environment& env, const Task& task, const GreedyConfig& cfg = {});

}  // namespace uavvlc
