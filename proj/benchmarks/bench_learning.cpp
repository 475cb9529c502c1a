#include <benchmark/benchmark.h>

#include "uavvlc/sac.hpp"

namespace {

using namespace uavvlc;

Batch batch_for(int obs_dim, int act_dim, int n) {
  Batch b;
  b.obs = Eigen::MatrixXd::Random(obs_dim, n);
  b.action = Eigen::MatrixXd::Random(act_dim, n);
  b.reward = Eigen::VectorXd::Random(n);
  b.next_obs = Eigen::MatrixXd::Random(obs_dim, n);
  b.done = Eigen::VectorXd::Zero(n);
  return b;
}

void BM_MlpForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  Rng rng(1);
  Mlp net({60, width, width, 2});
  net.initialize(rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(60, 64);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(2, 64);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.parameter_count());
  for (auto _ : state) {
    Mlp::Cache cache;
    net.forward(x, cache);
    benchmark::DoNotOptimize(net.backward(cache, g, grad));
  }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(64)->Arg(256);

// One simultaneous SAC update at the desk-scale dimensions (K = 5, N = 10).
void BM_SacUpdate(benchmark::State& state) {
  Rng rng(2);
  SacHyper h;
  const int obs_dim = 57, act_dim = 63;
  SacAgent agent(obs_dim, act_dim, h, rng);
  const Batch b = batch_for(obs_dim, act_dim, h.batch_size);
  for (auto _ : state) benchmark::DoNotOptimize(agent.update(b, rng));
}
BENCHMARK(BM_SacUpdate);

}  // namespace

BENCHMARK_MAIN();
