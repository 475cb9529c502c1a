#include "uavvlc/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace uavvlc {

using Eigen::Index;
using Eigen::MatrixXd;

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
  Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::initialize(Rng& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    const Index off = offsets_[l];
    for (Index i = 0; i < static_cast<Index>(in) * out; ++i) params_(off + i) = uniform(rng, -limit, limit);
    params_.segment(off + static_cast<Index>(in) * out, out).setZero();
  }
}

MatrixXd Mlp::forward(const MatrixXd& x) const {
  Cache scratch;
  return forward(x, scratch);
}

MatrixXd Mlp::forward(const MatrixXd& x, Cache& cache) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  const std::size_t n_layers = sizes_.size() - 1;
  cache.activations.resize(n_layers + 1);
  cache.activations[0] = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const Index off = offsets_[l];
    Eigen::Map<const MatrixXd> w(params_.data() + off, out, in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + off + static_cast<Index>(in) * out, out);
    MatrixXd z = w * cache.activations[l];
    z.colwise() += b;
    if (l + 1 < n_layers) z = z.array().tanh().matrix();
    cache.activations[l + 1] = std::move(z);
  }
  return cache.activations.back();
}

MatrixXd Mlp::backward(const Cache& cache, const MatrixXd& grad_out, Eigen::VectorXd& grad) const {
  const std::size_t n_layers = sizes_.size() - 1;
  if (cache.activations.size() != n_layers + 1) throw std::invalid_argument("Mlp::backward: stale cache");
  if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: gradient size mismatch");
  MatrixXd delta = grad_out;
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const Index off = offsets_[l];
    if (l + 1 < n_layers) {
      delta.array() *= 1.0 - cache.activations[l + 1].array().square();
    }
    Eigen::Map<MatrixXd> gw(grad.data() + off, out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + off + static_cast<Index>(in) * out, out);
    gw.noalias() += delta * cache.activations[l].transpose();
    gb += delta.rowwise().sum();
    Eigen::Map<const MatrixXd> w(params_.data() + off, out, in);
    delta = w.transpose() * delta;
  }
  return delta;
}

void soft_update(Mlp& target, const Mlp& online, double coefficient) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: network shapes differ");
  if (coefficient == 1.0) {
    target.parameters() = online.parameters();
    return;
  }
  target.parameters() = (1.0 - coefficient) * target.parameters() + coefficient * online.parameters();
}

}  // namespace uavvlc
