#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/channel.hpp"
#include "uavvlc/dimming.hpp"
#include "uavvlc/flight.hpp"

namespace uavvlc {

struct PowerConfig {
  double amp_efficiency = 1.2;     // zeta-double-dot
  double conversion_factor = 1.0;  // varphi
  double circuit_power = 1.0;      // P_Cir, W
};

struct QosConfig {
  double r_min = 2.0;   // bits/s/Hz
  double p_max = 20.0;  // W
};

/// Receiver-side constants of the downlink.
struct ReceiverConfig {
  double noise_var = 1e-21;   // sigma_k^2, A^2, shared by all users
  double csi_radius = 1e-10;  // delta
  double user_height = 0.0;   // m
};

/// Every physical constant of one UAV/LED-array/user scenario.
struct SystemModel {
  OpticsParams optics;
  ReceiverConfig receiver;
  DimmingConfig dimming;
  FlightConfig flight;
  RotorcraftParams rotor;
  PowerConfig power;
  QosConfig qos;
  int n_users = 5;

  void validate() const;
};

/// One slot's decision: precoder, LED on/off pattern, bias, velocity.
struct AllocationAction {
  Beamformer beam;
  LedSelection leds;
  double i_dc = 0.0;
  Vec3 velocity = Vec3::Zero();
};

struct PowerBreakdown {
  double transmit = 0.0;
  double bias = 0.0;
  double circuit = 0.0;
  double propulsion = 0.0;
  double total = 0.0;
};

struct RateReport {
  std::vector<double> rates;  // bits/s/Hz, indexed by user
  double sum_rate = 0.0;
  std::vector<int> order;     // decoding order, weakest effective gain first
};

/// Constraint flags, index 0 is C1 (QoS) through index 8 is C9 (binary selection).
struct FeasibilityReport {
  std::array<bool, 9> ok{};

  bool all() const;
  bool operator[](int c) const { return ok[static_cast<std::size_t>(c - 1)]; }
  std::string bits() const;
};

/// Effective gains G(k, i) = h_k^T A w_i (K x K).
Eigen::MatrixXd effective_gains(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a);

/// SIC decoding order: ascending |h_k^T A w_k|^2, ties by user index.
std::vector<int> order_users(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a);

/// Per-user NOMA rate; user order[j] is interfered by the users order[j+1..].
RateReport per_user_rate(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a,
                         const Eigen::VectorXd& noise_var, std::span<const int> order);

/// Amplifier, bias, circuit and propulsion power. The amplifier term uses |w|
/// so that bipolar precoders cannot report negative power.
PowerBreakdown total_power(const Beamformer& w, const LedSelection& a, double i_dc, double p_prop,
                           const PowerConfig& cfg);

/// Sum rate per watt; throws std::domain_error for non-positive total power.
double energy_efficiency(const RateReport& rates, const PowerBreakdown& power);

struct SlotEvaluation {
  RateReport rates;
  PowerBreakdown power;
  FeasibilityReport feasibility;
  double energy_efficiency = 0.0;
};

/// Evaluates one slot against the full constraint set. Rates (and C1) use the
/// true channels in `channels`; flight checks start from `uav`.
SlotEvaluation evaluate_slot(const AllocationAction& action, const ChannelState& channels,
                             const UavState& uav, const SystemModel& model);

inline FeasibilityReport check_p1_feasibility(const AllocationAction& action, const ChannelState& channels,
                                              const UavState& uav, const SystemModel& model) {
  return evaluate_slot(action, channels, uav, model).feasibility;
}

}  // namespace uavvlc
