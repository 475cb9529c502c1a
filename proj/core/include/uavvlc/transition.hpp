#pragma once

#include <Eigen/Dense>

namespace uavvlc {

struct Transition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;
};

}  // namespace uavvlc
