#include "uavvlc/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavvlc {

void OpticsParams::validate() const {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(half_power_semiangle > 0.0 && half_power_semiangle < half_pi)) {
    throw std::domain_error("half-power semi-angle must lie in (0, pi/2)");
  }
  if (!(fov_semiangle > 0.0 && fov_semiangle <= half_pi)) {
    throw std::domain_error("FOV semi-angle must lie in (0, pi/2]");
  }
  if (!(pd_area > 0.0)) throw std::domain_error("photodiode area must be positive");
  if (!(refractive_index >= 0.0)) throw std::domain_error("refractive index must be >= 0");
}

double lambertian_order(double half_power_semiangle) {
  const double c = std::cos(half_power_semiangle);
  if (!(half_power_semiangle > 0.0 && half_power_semiangle < std::numbers::pi / 2.0) ||
      c <= 0.0 || c >= 1.0) {
    throw std::domain_error("lambertian_order: half-power semi-angle outside (0, pi/2)");
  }
  return -std::numbers::ln2 / std::log(c);
}

double concentrator_gain(double incidence, const OpticsParams& optics) {
  if (incidence < 0.0 || incidence > optics.fov_semiangle) return 0.0;
  const double s = std::sin(optics.fov_semiangle);
  return optics.refractive_index * optics.refractive_index / (s * s);
}

double los_channel_gain(const Position& uav, const Position& user, const OpticsParams& optics) {
  const double d = distance(uav, user);
  if (d == 0.0) throw std::invalid_argument("los_channel_gain: UAV and user coincide");
  const double height = uav.z - user.z;
  if (height <= 0.0) return 0.0;

  const double cos_angle = std::min(1.0, height / d);
  const double incidence = std::acos(cos_angle);
  const double gain = concentrator_gain(incidence, optics);
  if (gain == 0.0) return 0.0;

  const double m = lambertian_order(optics.half_power_semiangle);
  return (m + 1.0) * optics.pd_area / (2.0 * std::numbers::pi * d * d) * gain *
         std::pow(cos_angle, m) * cos_angle;
}

Eigen::MatrixXd channel_matrix(const Position& uav, std::span<const Position> users,
                               const OpticsParams& optics, int n_leds) {
  if (users.empty()) throw std::invalid_argument("channel_matrix: no users");
  if (n_leds < 1) throw std::invalid_argument("channel_matrix: need at least one LED");

  Eigen::MatrixXd h(n_leds, static_cast<Eigen::Index>(users.size()));
  for (std::size_t k = 0; k < users.size(); ++k) {
    h.col(static_cast<Eigen::Index>(k)).setConstant(los_channel_gain(uav, users[k], optics));
  }
  return h;
}

Eigen::MatrixXd perturb_csi(const Eigen::MatrixXd& gains, double radius, Rng& rng) {
  if (radius < 0.0) throw std::invalid_argument("perturb_csi: negative uncertainty radius");
  Eigen::MatrixXd est = gains;
  if (radius == 0.0) return est;
  std::uniform_real_distribution<double> eps(-radius, radius);
  for (Eigen::Index j = 0; j < est.cols(); ++j) {
    for (Eigen::Index i = 0; i < est.rows(); ++i) {
      est(i, j) = std::max(0.0, est(i, j) + eps(rng));
    }
  }
  return est;
}

}  // namespace uavvlc
