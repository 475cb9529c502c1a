#include "uavvlc/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace uavvlc {

Batch make_batch(std::span<const Transition> transitions) {
  if (transitions.empty()) throw std::invalid_argument("make_batch: no transitions");
  const auto n = static_cast<Eigen::Index>(transitions.size());
  const Eigen::Index obs_dim = transitions.front().obs.size();
  const Eigen::Index act_dim = transitions.front().action.size();
  Batch b;
  b.obs.resize(obs_dim, n);
  b.action.resize(act_dim, n);
  b.next_obs.resize(obs_dim, n);
  b.reward.resize(n);
  b.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[static_cast<std::size_t>(i)];
    if (t.obs.size() != obs_dim || t.next_obs.size() != obs_dim || t.action.size() != act_dim) {
      throw std::invalid_argument("make_batch: inconsistent transition shapes");
    }
    b.obs.col(i) = t.obs;
    b.action.col(i) = t.action;
    b.next_obs.col(i) = t.next_obs;
    b.reward(i) = t.reward;
    b.done(i) = t.done ? 1.0 : 0.0;
  }
  return b;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng) {
  if (n > population) throw std::invalid_argument("sample_without_replacement: n exceeds population");
  std::vector<std::size_t> out;
  out.reserve(n);
  std::unordered_set<std::size_t> seen;
  for (std::size_t j = population - n; j < population; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      seen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

ReplayBuffer::ReplayBuffer(const ReplayBuffer& other) : capacity_(other.capacity_) {
  std::lock_guard lock(other.mu_);
  data_ = other.data_;
  head_ = other.head_;
}

ReplayBuffer& ReplayBuffer::operator=(const ReplayBuffer& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  capacity_ = other.capacity_;
  data_ = other.data_;
  head_ = other.head_;
  return *this;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mu_);
  return data_.size();
}

void ReplayBuffer::push(Transition t) {
  std::lock_guard lock(mu_);
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    return;
  }
  data_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

void ReplayBuffer::clear() {
  std::lock_guard lock(mu_);
  data_.clear();
  head_ = 0;
}

Transition ReplayBuffer::at(std::size_t i) const {
  std::lock_guard lock(mu_);
  if (i >= data_.size()) throw std::out_of_range("ReplayBuffer::at");
  return data_[(head_ + i) % data_.size()];
}

std::vector<Transition> ReplayBuffer::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<Transition> out;
  out.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) out.push_back(data_[(head_ + i) % data_.size()]);
  return out;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::lock_guard lock(mu_);
  if (data_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  const auto idx = sample_without_replacement(data_.size(), std::min(n, data_.size()), rng);
  std::vector<Transition> picked;
  picked.reserve(idx.size());
  for (std::size_t i : idx) picked.push_back(data_[i]);
  return make_batch(picked);
}

}  // namespace uavvlc
