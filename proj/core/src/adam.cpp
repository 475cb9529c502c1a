#include "uavvlc/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace uavvlc {

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::range_error("ADAM learning rate must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::range_error("ADAM beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::range_error("ADAM beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw std::range_error("ADAM epsilon must be positive");
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  params.array() -= cfg.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace uavvlc
