#include "uavvlc/flight.hpp"

#include <cmath>
#include <stdexcept>

namespace uavvlc {
namespace {

constexpr double kInclusiveTol = 1e-9;

bool strictly_inside(const Position& p, const Position& lo, const Position& hi) {
  return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y && p.z > lo.z && p.z < hi.z;
}

}  // namespace

void FlightConfig::validate() const {
  if (!(slot_duration > 0.0)) throw std::range_error("slot duration must be positive");
  if (!(v_max > 0.0)) throw std::range_error("V_max must be positive");
  if (!(a_max > 0.0)) throw std::range_error("a_max must be positive");
  if (!(q_min.x < q_max.x && q_min.y < q_max.y && q_min.z < q_max.z)) {
    throw std::range_error("q_min must be below q_max component-wise");
  }
  if (!strictly_inside(q_init, q_min, q_max)) throw std::range_error("q_init must lie inside the flight box");
  if (n_slots < 1) throw std::range_error("need at least one slot");
  if (!(return_tolerance >= 0.0)) throw std::range_error("return tolerance must be >= 0");
}

void RotorcraftParams::validate() const {
  for (double v : {profile_drag, air_density, rotor_solidity, disk_area, blade_angular_velocity,
                   rotor_radius, induced_correction, weight, hover_induced_velocity, fuselage_drag_ratio}) {
    if (!(v > 0.0)) throw std::range_error("rotorcraft parameters must all be positive");
  }
}

std::string_view to_string(FlightConstraint c) {
  switch (c) {
    case FlightConstraint::kinematics: return "kinematics";
    case FlightConstraint::bounds: return "bounds";
    case FlightConstraint::acceleration: return "acceleration";
    case FlightConstraint::speed: return "speed";
    case FlightConstraint::return_to_start: return "return_to_start";
  }
  return "unknown";
}

UavState step_kinematics(const UavState& state, const Vec3& v_next, const FlightConfig& cfg) {
  UavState next;
  next.position = Position::from(state.position.vec() + v_next * cfg.slot_duration);
  next.velocity = v_next;
  next.slot = state.slot + 1;
  return next;
}

std::vector<FlightConstraint> check_flight(const UavState& state, const Vec3& v_next,
                                           const FlightConfig& cfg) {
  std::vector<FlightConstraint> violated;
  const UavState next = step_kinematics(state, v_next, cfg);

  if (!strictly_inside(next.position, cfg.q_min, cfg.q_max)) violated.push_back(FlightConstraint::bounds);

  const double dv_limit = cfg.a_max * cfg.slot_duration;
  if ((v_next - state.velocity).norm() > dv_limit * (1.0 + kInclusiveTol)) {
    violated.push_back(FlightConstraint::acceleration);
  }
  if (v_next.norm() > cfg.v_max * (1.0 + kInclusiveTol)) violated.push_back(FlightConstraint::speed);

  if (next.slot == cfg.n_slots && distance(next.position, cfg.q_init) > cfg.return_tolerance) {
    violated.push_back(FlightConstraint::return_to_start);
  }
  return violated;
}

Vec3 clamp_velocity(const Vec3& current, const Vec3& command, const FlightConfig& cfg) {
  const double dv_limit = cfg.a_max * cfg.slot_duration;
  Vec3 dv = command - current;
  const double dv_norm = dv.norm();
  if (dv_norm > dv_limit) dv *= dv_limit / dv_norm;

  // Radial projection onto the speed ball is non-expansive, so it cannot undo
  // the acceleration limit as long as `current` is itself within V_max.
  Vec3 v = current + dv;
  const double speed = v.norm();
  if (speed > cfg.v_max) v *= cfg.v_max / speed;
  return v;
}

HoverPower hover_power(const RotorcraftParams& p) {
  HoverPower h;
  h.blade = p.profile_drag / 8.0 * p.air_density * p.rotor_solidity * p.disk_area *
            std::pow(p.blade_angular_velocity, 3) * std::pow(p.rotor_radius, 3);
  h.induced = (1.0 + p.induced_correction) * std::pow(p.weight, 1.5) /
              std::sqrt(2.0 * p.air_density * p.disk_area);
  h.total = h.blade + h.induced;
  return h;
}

PropulsionTerms propulsion_terms(double speed, const RotorcraftParams& p) {
  const HoverPower hov = hover_power(p);
  const double v2 = speed * speed;
  const double tip2 = p.blade_angular_velocity * p.blade_angular_velocity * p.rotor_radius * p.rotor_radius;
  const double vi2 = p.hover_induced_velocity * p.hover_induced_velocity;

  // sqrt(1 + x^2) - x with x = v^2 / (2 v_UI^2), written in the cancellation-free
  // form 1 / (sqrt(1 + x^2) + x); it equals 1 at hover and stays positive.
  const double x = v2 / (2.0 * vi2);
  const double inner = 1.0 / (std::sqrt(1.0 + x * x) + x);

  PropulsionTerms t;
  t.blade = (1.0 + 3.0 * v2 / tip2) * hov.blade;
  t.induced = std::sqrt(inner) * hov.induced;
  t.parasite = 0.5 * p.fuselage_drag_ratio * p.air_density * p.rotor_solidity * p.disk_area * v2 * speed;
  t.total = t.blade + t.induced + t.parasite;
  return t;
}

}  // namespace uavvlc
