#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace uavvlc {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First/second moment estimates and the step counter for one parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;

  static AdamState zeros(Eigen::Index n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0}; }
};

/// One bias-corrected ADAM step (descent). Throws std::invalid_argument on a
/// size mismatch between params, grad and the moments.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, const AdamConfig& cfg);

}  // namespace uavvlc
