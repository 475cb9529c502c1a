#include <vector>

#include <benchmark/benchmark.h>

#include "uavvlc/baselines.hpp"
#include "uavvlc/env.hpp"
#include "uavvlc/training.hpp"

namespace {

using namespace uavvlc;

void BM_ChannelMatrix(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<Position> u;
  for (int k = 0; k < users; ++k) u.push_back({uniform(rng, 0, 150), uniform(rng, 0, 150), 0.0});
  const OpticsParams o;
  for (auto _ : state) benchmark::DoNotOptimize(channel_matrix({75, 75, 40}, u, o, 10));
}
BENCHMARK(BM_ChannelMatrix)->Arg(5)->Arg(30);

void BM_EnvStep(benchmark::State& state) {
  SystemModel m;
  m.n_users = static_cast<int>(state.range(0));
  m.flight.n_slots = 1000000;
  Environment env(m);
  Rng rng(2);
  env.reset(sample_task(m, rng));
  const Eigen::VectorXd a = 0.1 * uniform_action(env.action_dim(), rng);
  for (auto _ : state) {
    if (env.done()) env.reset(env.task());
    benchmark::DoNotOptimize(env.step(a));
  }
}
BENCHMARK(BM_EnvStep)->Arg(5)->Arg(30);

void BM_GreedyAction(benchmark::State& state) {
  SystemModel m;
  m.n_users = static_cast<int>(state.range(0));
  m.flight.n_slots = 40;
  Environment env(m);
  Rng rng(3);
  env.reset(sample_task(m, rng));
  for (auto _ : state) {
    if (env.done()) env.reset(env.task());
    env.apply(greedy_action(env));
  }
}
BENCHMARK(BM_GreedyAction)->Arg(5)->Arg(10);

}  // namespace
