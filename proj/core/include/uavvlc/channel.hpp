#pragma once

#include <span>

#include <Eigen/Dense>

#include "uavvlc/random.hpp"

namespace uavvlc {

using Vec3 = Eigen::Vector3d;

/// Cartesian position in metres. Users sit on or above the ground plane.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  static Position from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
  return (a.vec() - b.vec()).norm();
}

/// LED emitter and photodiode receiver optics. Angles in radians.
struct OpticsParams {
  double half_power_semiangle = 1.0471975511965976;  // 60 deg
  double fov_semiangle = 1.0471975511965976;         // 60 deg
  double pd_area = 1e-4;                             // 1 cm^2
  double refractive_index = 1.5;

  void validate() const;
};

/// True and estimated N x K optical gains (rows are LEDs, columns users).
struct ChannelState {
  Eigen::MatrixXd true_gain;
  Eigen::MatrixXd est_gain;
  Eigen::VectorXd noise_var;
  double uncertainty_radius = 0.0;
};

/// Lambertian emission order m = -ln 2 / ln cos(half-power semi-angle).
/// Throws std::domain_error unless 0 < angle < pi/2.
double lambertian_order(double half_power_semiangle);

/// Optical concentrator gain q^2 / sin^2(FOV) inside the field of view, 0 outside.
double concentrator_gain(double incidence, const OpticsParams& optics);

/// Line-of-sight DC gain from the (co-located) LED array to one photodiode.
///
/// The array faces straight down and the photodiode straight up, so the
/// irradiance and incidence angles coincide with cos = (z_uav - z_user) / d.
/// A UAV at or below the user has the user behind the emitter plane and
/// yields 0. Throws std::invalid_argument when the two points coincide.
double los_channel_gain(const Position& uav, const Position& user, const OpticsParams& optics);

/// N x K gain matrix; every LED row is identical because the array is treated
/// as a single point. Throws std::invalid_argument for an empty user list or
/// n_leds < 1.
Eigen::MatrixXd channel_matrix(const Position& uav, std::span<const Position> users,
                               const OpticsParams& optics, int n_leds);

/// Bounded CSI error: each entry gets an independent uniform draw on
/// [-radius, radius]; negative estimates are clamped to zero.
Eigen::MatrixXd perturb_csi(const Eigen::MatrixXd& gains, double radius, Rng& rng);

}  // namespace uavvlc
