#pragma once

#include <vector>

#include <Eigen/Dense>

#include "uavvlc/random.hpp"

namespace uavvlc {

/// Fully connected network, tanh hidden layers and a linear output layer.
///
/// All weights and biases live in one flat vector so optimisers, Polyak
/// averaging and checkpoints can treat a network as a single array. Layer l
/// stores W_l (out x in, column-major) followed by b_l.
class Mlp {
 public:
  /// Activations of one forward pass, kept for backward().
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // [input, hidden..., output]
  };

  Mlp() = default;
  /// sizes = {in, hidden..., out}; at least two entries, all positive.
  explicit Mlp(std::vector<int> sizes);

  /// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases.
  void initialize(Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  /// Column-wise batch forward: x is (in x B), result is (out x B).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  /// Back-propagates dL/d(output). Adds dL/d(params) into `grad` and returns
  /// dL/d(input).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_out, Eigen::VectorXd& grad) const;

  bool same_shape(const Mlp& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Eigen::VectorXd params_;
};

/// target <- (1 - c) target + c online. Throws std::invalid_argument on shape mismatch.
void soft_update(Mlp& target, const Mlp& online, double coefficient);

}  // namespace uavvlc
