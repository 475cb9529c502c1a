#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "uavvlc/checkpoint.hpp"
#include "uavvlc/meta_sac.hpp"

namespace uavvlc {
namespace {

SystemModel tiny_model() {
  SystemModel m;
  m.n_users = 2;
  m.dimming.n_leds = 4;
  m.flight.n_slots = 5;
  return m;
}

SacHyper tiny_hyper() {
  SacHyper h;
  h.hidden = {8};
  h.batch_size = 8;
  return h;
}

MetaConfig tiny_meta(int iterations) {
  MetaConfig c;
  c.n_tasks = 2;
  c.iterations = iterations;
  c.inner_steps = 2;
  c.warmup_episodes = 1;
  return c;
}

TaskSampler sampler_for(const SystemModel& m) {
  return [m](Rng& rng) { return sample_task(m, rng); };
}

void fill(TaskBuffer& buf, int n, Rng& rng) {
  for (int i = 0; i < n; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::NullaryExpr(3, [&] { return uniform(rng, -1, 1); });
    t.action = Eigen::VectorXd::NullaryExpr(2, [&] { return uniform(rng, -1, 1); });
    t.reward = i;
    t.next_obs = t.obs;
    buf.data().push(t);
  }
}

TEST(AdaptCopy, ScalarGradientDescent) {
  // theta^2 with step 0.1 from theta = 1: theta <- 0.8 theta.
  const double global = 1.0;
  const double local = adapt_copy(global, 1, [](double& th) { th -= 0.1 * 2 * th; });
  EXPECT_DOUBLE_EQ(local, 0.8);
  EXPECT_DOUBLE_EQ(global, 1.0);
  EXPECT_NEAR(adapt_copy(global, 3, [](double& th) { th -= 0.1 * 2 * th; }), 0.512, 1e-15);
  EXPECT_EQ(adapt_copy(global, 0, [](double& th) { th = 42; }), global);
}

TEST(TaskBuffer, SplitsPartitionTheData) {
  Rng rng(1);
  TaskBuffer buf(100);
  fill(buf, 50, rng);
  for (int i = 0; i < 20; ++i) {
    buf.resplit(0.8, rng);
    EXPECT_EQ(buf.support().size(), 40u);
    EXPECT_EQ(buf.query().size(), 10u);
    std::set<std::size_t> all(buf.support().begin(), buf.support().end());
    for (std::size_t q : buf.query()) EXPECT_TRUE(all.insert(q).second);
    EXPECT_EQ(all.size(), 50u);
  }
  TaskBuffer two(10);
  fill(two, 2, rng);
  two.resplit(0.99, rng);
  EXPECT_EQ(two.support().size(), 1u);
  EXPECT_EQ(two.query().size(), 1u);
  EXPECT_THROW(TaskBuffer(4).sample_query(1, rng), std::logic_error);
}

TEST(TaskBuffer, SupportAndQueryBatchesComeFromTheirSets) {
  Rng rng(2);
  TaskBuffer buf(100);
  fill(buf, 30, rng);
  buf.resplit(0.5, rng);
  std::set<double> support_rewards;
  for (std::size_t i : buf.support()) support_rewards.insert(buf.data().at(i).reward);
  const Batch s = buf.sample_support(100, rng);
  const Batch q = buf.sample_query(100, rng);
  EXPECT_EQ(s.size(), 15);
  for (Eigen::Index j = 0; j < s.size(); ++j) EXPECT_TRUE(support_rewards.contains(s.reward(j)));
  for (Eigen::Index j = 0; j < q.size(); ++j) EXPECT_FALSE(support_rewards.contains(q.reward(j)));
}

TEST(InnerAdapt, LeavesTheGlobalLearnerAlone) {
  Rng rng(3);
  SacAgent global(3, 1, tiny_hyper(), rng);
  TaskBuffer buf(50);
  Rng data(4);
  for (int i = 0; i < 20; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::Random(3);
    t.action = Eigen::VectorXd::Random(1);
    t.next_obs = Eigen::VectorXd::Random(3);
    t.reward = 1.0;
    buf.data().push(t);
  }
  buf.resplit(0.8, data);
  const SacAgent before = global;
  MetaConfig cfg = tiny_meta(1);
  const SacAgent local = inner_adapt(global, buf, cfg, data);
  EXPECT_EQ(global.networks().actor.parameters(), before.networks().actor.parameters());
  EXPECT_EQ(global.networks().critic1.parameters(), before.networks().critic1.parameters());
  EXPECT_EQ(global.update_count(), before.update_count());
  EXPECT_NE(local.networks().critic1.parameters(), before.networks().critic1.parameters());
  EXPECT_EQ(local.update_count(), before.update_count() + cfg.inner_steps);
  EXPECT_EQ(local.hyper().lr_actor, cfg.inner_lr_actor);

  cfg.inner_steps = 0;
  const SacAgent same = inner_adapt(global, buf, cfg, data);
  EXPECT_EQ(same.networks().actor.parameters(), global.networks().actor.parameters());
}

TEST(InnerAdapt, OneStepEqualsAPlainSacUpdate) {
  Rng rng(5);
  SacAgent global(3, 1, tiny_hyper(), rng);
  TaskBuffer buf(50);
  Rng data(6);
  for (int i = 0; i < 30; ++i) {
    Transition t;
    t.obs = Eigen::VectorXd::NullaryExpr(3, [&] { return uniform(data, -1, 1); });
    t.action = Eigen::VectorXd::NullaryExpr(1, [&] { return uniform(data, -1, 1); });
    t.next_obs = t.obs;
    t.reward = uniform(data, -1, 1);
    buf.data().push(t);
  }
  buf.resplit(0.8, data);
  MetaConfig cfg = tiny_meta(1);
  cfg.inner_steps = 1;

  Rng r1(7), r2(7);
  const SacAgent adapted = inner_adapt(global, buf, cfg, r1);

  SacAgent manual = global;
  manual.hyper().lr_actor = cfg.inner_lr_actor;
  manual.hyper().lr_critic1 = manual.hyper().lr_critic2 = cfg.inner_lr_critic;
  manual.reset_optimizers();
  manual.update(buf.sample_support(static_cast<std::size_t>(manual.hyper().batch_size), r2), r2);
  EXPECT_EQ(adapted.networks().actor.parameters(), manual.networks().actor.parameters());
  EXPECT_EQ(adapted.networks().critic2.parameters(), manual.networks().critic2.parameters());
}

TEST(OuterUpdate, SumsTaskGradients) {
  Rng rng(8);
  SacAgent global(3, 1, tiny_hyper(), rng);
  std::vector<SacAgent> adapted{global, global};
  Batch q;
  q.obs = q.next_obs = Eigen::MatrixXd::Random(3, 4);
  q.action = Eigen::MatrixXd::Random(1, 4);
  q.reward = Eigen::VectorXd::Random(4);
  q.done = Eigen::VectorXd::Zero(4);
  std::vector<Batch> queries{q, q};
  Rng r1(9), r2(9);
  SacAgent copy = global;
  const SacGradients total = outer_update(global, adapted, queries, r1);
  SacGradients expect = sac_gradients(adapted[0].networks(), q, r2, copy.hyper());
  expect += sac_gradients(adapted[1].networks(), q, r2, copy.hyper());
  EXPECT_LT((total.actor - expect.actor).norm(), 1e-12 * std::max(1.0, expect.actor.norm()));
  copy.apply_gradients(expect);
  EXPECT_LT((global.networks().critic1.parameters() - copy.networks().critic1.parameters()).norm(), 1e-12);

  EXPECT_THROW(outer_update(global, std::span<const SacAgent>{}, std::span<const Batch>{}, r1),
               std::invalid_argument);
  EXPECT_THROW(outer_update(global, adapted, std::span<const Batch>(queries).first(1), r1), std::invalid_argument);
}

TEST(MetaTrain, ZeroIterationsOnlyCollectsWarmup) {
  const SystemModel m = tiny_model();
  Environment env(m);
  const MetaState s = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(0), 11);
  EXPECT_EQ(s.iteration, 0);
  EXPECT_EQ(s.tasks.size(), 2u);
  EXPECT_EQ(s.buffers[0].data().size(), static_cast<std::size_t>(m.flight.n_slots));
  EXPECT_TRUE(s.query_loss.empty());
  Rng rng(derive_seed(11, 1));
  const SacAgent fresh(env.observation_dim(), env.action_dim(), tiny_hyper(), rng);
  EXPECT_EQ(s.global.networks().actor.parameters(), fresh.networks().actor.parameters());
}

TEST(MetaTrain, DeterministicPerSeed) {
  const SystemModel m = tiny_model();
  Environment env(m);
  const MetaState a = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(3), 21);
  const MetaState b = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(3), 21);
  const MetaState c = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(3), 22);
  EXPECT_EQ(a.global.networks().actor.parameters(), b.global.networks().actor.parameters());
  EXPECT_EQ(a.query_loss, b.query_loss);
  EXPECT_NE(a.global.networks().actor.parameters(), c.global.networks().actor.parameters());
  EXPECT_EQ(a.iteration, 3);
}

TEST(MetaTrain, ContinuingMatchesOneLongRun) {
  const SystemModel m = tiny_model();
  Environment env(m);
  const MetaState whole = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(4), 31);
  MetaState split = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(2), 31);
  meta_train_more(split, env, tiny_meta(2), 2);
  EXPECT_EQ(whole.global.networks().critic1.parameters(), split.global.networks().critic1.parameters());
}

TEST(MetaAdapt, ZeroBudgetReturnsTheGlobalPolicy) {
  const SystemModel m = tiny_model();
  Environment env(m);
  Rng rng(41);
  const SacAgent global(env.observation_dim(), env.action_dim(), tiny_hyper(), rng);
  TrainConfig budget;
  budget.episodes = 0;
  const SacAgent out = meta_adapt(global, env, sample_task(m, rng), tiny_meta(0), budget, rng);
  EXPECT_EQ(out.networks().actor.parameters(), global.networks().actor.parameters());
  EXPECT_EQ(out.hyper().lr_critic1, tiny_meta(0).adapt_lr_critic1);
}

TEST(MetaCheckpoint, RoundTripIsBitExact) {
  const SystemModel m = tiny_model();
  Environment env(m);
  const MetaState s = meta_train(env, sampler_for(m), tiny_hyper(), tiny_meta(2), 51);
  std::stringstream io;
  write_meta_state(io, s);
  const MetaState r = read_meta_state(io, 100);
  EXPECT_EQ(r.global.networks().actor.parameters(), s.global.networks().actor.parameters());
  EXPECT_EQ(r.global.networks().target_critic2.parameters(), s.global.networks().target_critic2.parameters());
  EXPECT_EQ(r.global.optimizers().critic1.v, s.global.optimizers().critic1.v);
  EXPECT_EQ(r.global.optimizers().actor.t, s.global.optimizers().actor.t);
  EXPECT_EQ(r.iteration, s.iteration);
  EXPECT_EQ(r.seed, s.seed);
  EXPECT_EQ(r.query_loss, s.query_loss);
  ASSERT_EQ(r.tasks.size(), s.tasks.size());
  for (std::size_t t = 0; t < s.tasks.size(); ++t) {
    EXPECT_EQ(r.tasks[t].users, s.tasks[t].users);
    EXPECT_EQ(r.tasks[t].q_init, s.tasks[t].q_init);
  }
  EXPECT_TRUE(r.buffers[0].data().empty());

  std::stringstream bad(io.str().substr(0, io.str().size() / 2));
  EXPECT_THROW(read_meta_state(bad, 100), std::runtime_error);
}

TEST(AgentCheckpoint, RoundTripIsBitExact) {
  Rng rng(61);
  SacHyper h = tiny_hyper();
  h.reward_shift = 12.5;
  h.entropy_weight = 0.1234567890123;
  SacAgent a(3, 2, h, rng);
  Batch b;
  b.obs = b.next_obs = Eigen::MatrixXd::Random(3, 8);
  b.action = Eigen::MatrixXd::Random(2, 8);
  b.reward = Eigen::VectorXd::Random(8);
  b.done = Eigen::VectorXd::Zero(8);
  a.update(b, rng);
  std::stringstream io;
  write_agent(io, a);
  const SacAgent r = read_agent(io);
  EXPECT_EQ(r.networks().critic2.parameters(), a.networks().critic2.parameters());
  EXPECT_EQ(r.networks().target_actor.parameters(), a.networks().target_actor.parameters());
  EXPECT_EQ(r.optimizers().actor.m, a.optimizers().actor.m);
  EXPECT_EQ(r.update_count(), a.update_count());
  EXPECT_EQ(r.hyper().entropy_weight, h.entropy_weight);
  EXPECT_EQ(r.hyper().reward_shift, h.reward_shift);
  EXPECT_EQ(r.hyper().hidden, h.hidden);

  std::stringstream garbage("not a checkpoint");
  EXPECT_THROW(read_agent(garbage), std::runtime_error);
}

}  // namespace
}  // namespace uavvlc
