#pragma once

#include <string_view>
#include <vector>

#include "uavvlc/channel.hpp"

namespace uavvlc {

/// Slotted flight envelope. q_init is the take-off/landing point the UAV
/// must return to after n_slots slots.
struct FlightConfig {
  double slot_duration = 1.0;  // tau, s
  double v_max = 10.0;         // m/s
  double a_max = 6.0;          // m/s^2
  Position q_min{0.0, 0.0, 0.0};
  Position q_max{150.0, 150.0, 100.0};
  Position q_init{75.0, 75.0, 50.0};
  int n_slots = 20;              // L
  double return_tolerance = 0.5; // m

  double horizon() const { return n_slots * slot_duration; }
  void validate() const;
};

/// Rotary-wing parameters for the hover and propulsion power models.
struct RotorcraftParams {
  double profile_drag = 0.012;      // rho
  double air_density = 1.225;       // zeta, kg/m^3
  double rotor_solidity = 0.05;     // delta
  double disk_area = 0.79;          // A_U, m^2
  double blade_angular_velocity = 400.0;  // Omega_U, rad/s
  double rotor_radius = 0.05;       // R_U, m
  double induced_correction = 1.0;  // iota
  double weight = 100.0;            // W_U, N
  double hover_induced_velocity = 7.2;  // v_UI, m/s
  double fuselage_drag_ratio = 0.3;     // d_U

  void validate() const;
};

struct UavState {
  Position position;
  Vec3 velocity = Vec3::Zero();  // velocity flown during the previous slot
  int slot = 0;
};

/// Flight constraints of the slotted trajectory problem. Return-to-start is
/// the boundary condition attached to the kinematic update.
enum class FlightConstraint { kinematics, bounds, acceleration, speed, return_to_start };

std::string_view to_string(FlightConstraint c);

/// Advances one slot: position += v_next * tau.
UavState step_kinematics(const UavState& state, const Vec3& v_next, const FlightConfig& cfg);

/// Lists every constraint that flying v_next from `state` would break.
/// Inclusive bounds (acceleration, speed) carry a 1e-9 relative tolerance;
/// the box bound is strict.
std::vector<FlightConstraint> check_flight(const UavState& state, const Vec3& v_next,
                                           const FlightConfig& cfg);

/// Nearest command to `command` that satisfies both the acceleration and the
/// speed limit, starting from a velocity that already satisfies the speed limit.
Vec3 clamp_velocity(const Vec3& current, const Vec3& command, const FlightConfig& cfg);

struct HoverPower {
  double blade = 0.0;
  double induced = 0.0;
  double total = 0.0;
};

struct PropulsionTerms {
  double blade = 0.0;
  double induced = 0.0;
  double parasite = 0.0;
  double total = 0.0;
};

HoverPower hover_power(const RotorcraftParams& p);

/// Blade-profile, induced and parasite power at forward speed |v|.
PropulsionTerms propulsion_terms(double speed, const RotorcraftParams& p);

inline double propulsion_power(const Vec3& v, const RotorcraftParams& p) {
  return propulsion_terms(v.norm(), p).total;
}

}  // namespace uavvlc
