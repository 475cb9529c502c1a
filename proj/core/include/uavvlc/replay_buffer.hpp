#pragma once

#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavvlc/random.hpp"
#include "uavvlc/transition.hpp"

namespace uavvlc {

/// Column-stacked minibatch (each column one transition).
struct Batch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd action;
  Eigen::VectorXd reward;
  Eigen::MatrixXd next_obs;
  Eigen::VectorXd done;  // 1.0 for terminal transitions

  Eigen::Index size() const { return reward.size(); }
};

Batch make_batch(std::span<const Transition> transitions);

/// n distinct indices drawn uniformly from [0, population) (Floyd's algorithm).
/// Throws std::invalid_argument when n > population.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng);

/// Fixed-capacity ring of transitions. Every member function locks, so
/// rollout threads may push while the learner samples.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  ReplayBuffer(const ReplayBuffer& other);
  ReplayBuffer& operator=(const ReplayBuffer& other);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Overwrites the oldest transition once full.
  void push(Transition t);
  void clear();

  /// Transition by age, 0 = oldest still stored.
  Transition at(std::size_t i) const;
  std::vector<Transition> snapshot() const;

  /// Uniform minibatch without replacement; n is capped at size().
  /// Throws std::logic_error on an empty buffer.
  Batch sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::vector<Transition> data_;
  std::size_t head_ = 0;  // next slot to overwrite once full
};

}  // namespace uavvlc
