#include <algorithm>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "uavvlc/replay_buffer.hpp"

namespace uavvlc {
namespace {

Transition tagged(double tag) {
  Transition t;
  t.obs = Eigen::VectorXd::Constant(2, tag);
  t.action = Eigen::VectorXd::Constant(1, -tag);
  t.reward = tag;
  t.next_obs = Eigen::VectorXd::Constant(2, tag + 1);
  t.done = static_cast<long>(tag) % 2 == 1;
  return t;
}

TEST(SampleWithoutReplacement, DistinctAndInRange) {
  Rng rng(1);
  for (std::size_t pop : {1u, 5u, 100u}) {
    for (std::size_t n = 0; n <= pop; n += std::max<std::size_t>(1, pop / 4)) {
      const auto idx = sample_without_replacement(pop, n, rng);
      ASSERT_EQ(idx.size(), n);
      EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), n);
      for (std::size_t i : idx) EXPECT_LT(i, pop);
    }
  }
  EXPECT_THROW(sample_without_replacement(3, 4, rng), std::invalid_argument);
}

TEST(ReplayBuffer, RingOverwritesOldest) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push(tagged(i));
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).reward, 2.0);
  EXPECT_EQ(buf.at(2).reward, 4.0);
  EXPECT_THROW(buf.at(3), std::out_of_range);
  buf.clear();
  EXPECT_TRUE(buf.empty());
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
}

TEST(ReplayBuffer, BatchColumnsMatchTransitions) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 4; ++i) buf.push(tagged(i));
  Rng rng(2);
  const Batch b = buf.sample(10, rng);
  ASSERT_EQ(b.size(), 4);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double tag = b.reward(j);
    EXPECT_EQ(b.obs(0, j), tag);
    EXPECT_EQ(b.action(0, j), -tag);
    EXPECT_EQ(b.next_obs(1, j), tag + 1);
    EXPECT_EQ(b.done(j), static_cast<long>(tag) % 2 == 1 ? 1.0 : 0.0);
  }
  EXPECT_THROW(ReplayBuffer(4).sample(1, rng), std::logic_error);
}

TEST(ReplayBuffer, UniformSampling) {
  // Chi-square over 100 elements, 1e5 draws of one element each; the 0.999
  // quantile of chi2(99) is about 148.2.
  ReplayBuffer buf(100);
  for (int i = 0; i < 100; ++i) buf.push(tagged(i));
  Rng rng(3);
  std::vector<int> counts(100, 0);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) ++counts[static_cast<std::size_t>(buf.sample(1, rng).reward(0))];
  const double expected = draws / 100.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 148.2);
}

TEST(ReplayBuffer, ConcurrentProducers) {
  ReplayBuffer buf(100000);
  std::vector<std::thread> producers;
  for (int p = 0; p < 4; ++p) {
    producers.emplace_back([&buf, p] {
      for (int i = 0; i < 2000; ++i) buf.push(tagged(p * 10000 + i));
    });
  }
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    if (!buf.empty()) buf.sample(8, rng);
  }
  for (auto& t : producers) t.join();
  EXPECT_EQ(buf.size(), 8000u);
  std::set<double> tags;
  for (const Transition& t : buf.snapshot()) tags.insert(t.reward);
  EXPECT_EQ(tags.size(), 8000u);
}

TEST(ReplayBuffer, CopyIsIndependent) {
  ReplayBuffer a(4);
  a.push(tagged(1));
  ReplayBuffer b = a;
  b.push(tagged(2));
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(b.size(), 2u);
}

TEST(MakeBatch, RejectsInconsistentShapes) {
  std::vector<Transition> ts{tagged(0), tagged(1)};
  ts[1].obs = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(make_batch(ts), std::invalid_argument);
  EXPECT_THROW(make_batch(std::vector<Transition>{}), std::invalid_argument);
}

}  // namespace
}  // namespace uavvlc
