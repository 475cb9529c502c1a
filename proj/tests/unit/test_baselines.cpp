#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "uavvlc/baselines.hpp"

namespace uavvlc {
namespace {

const auto kNoCap = [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };

bool ladder_holds(const Eigen::MatrixXd& g, const std::vector<int>& order, double target, const Eigen::VectorXd& noise,
                  const Eigen::VectorXd& p) {
  const std::size_t k = order.size();
  for (std::size_t j = 0; j < k; ++j) {
    const int u = order[j];
    double interference = 0.0;
    for (std::size_t q = j + 1; q < k; ++q) interference += std::pow(p(order[q]) * g(u, order[q]), 2);
    if (std::pow(p(u) * g(u, u), 2) < target * (interference + noise(u)) * (1 - 1e-9)) return false;
    if (j > 0 && p(u) * g(u, u) < p(order[j - 1]) * g(order[j - 1], order[j - 1]) * (1 - 1e-9)) return false;
  }
  return true;
}

TEST(PowerLadder, LeastFeasibleAmplitudes) {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.5, 0.5, 20.0;
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(2);
  const std::vector<int> order{0, 1};
  const LadderResult r = noma_power_ladder(g, g, order, 3.0, noise, 0.0, kNoCap, 1000);
  ASSERT_TRUE(r.feasible);
  EXPECT_TRUE(ladder_holds(g, order, 3.0, noise, r.amplitude));
  EXPECT_FALSE(ladder_holds(g, order, 3.0, noise, 0.99 * r.amplitude));
  EXPECT_NEAR(r.amplitude(0), std::sqrt(3.0 * (0.25 * r.amplitude(1) * r.amplitude(1) + 1.0)), 1e-12);
}

TEST(PowerLadder, EqualGainsCannotBeOrdered) {
  // Same gain for both users: the order constraint and the SINR target of the
  // first user chase each other upward until the cap stops them.
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(2, 2);
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(2);
  const std::vector<int> order{0, 1};
  const auto cap = [](const Eigen::VectorXd& p) { return 100.0 / p.maxCoeff(); };
  const LadderResult r = noma_power_ladder(g, g, order, 3.0, noise, 0.0, cap, 100000);
  EXPECT_FALSE(r.feasible);
  EXPECT_NEAR(r.amplitude.maxCoeff(), 100.0, 1e-9);
}

TEST(PowerLadder, UnreachableUserSpreadsTheCap) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  g(1, 1) = 0.0;
  const auto cap = [](const Eigen::VectorXd& p) { return 0.5 / p.maxCoeff(); };
  const LadderResult r = noma_power_ladder(g, g, std::vector<int>{0, 1}, 1.0, Eigen::VectorXd::Ones(2), 0.0, cap, 10);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.amplitude, Eigen::VectorXd::Constant(2, 0.5));
  EXPECT_THROW(noma_power_ladder(g, g, std::vector<int>{0}, 1.0, Eigen::VectorXd::Ones(2), 0.0, cap, 10),
               std::invalid_argument);
}

TEST(GreedyDirections, NormalisedOverActiveLeds) {
  Eigen::MatrixXd h(3, 2);
  h << 1, 0, 2, 0, 3, 0;
  const Eigen::MatrixXd d = greedy_directions(h, LedSelection{{1, 0, 1}});
  EXPECT_NEAR(d(0, 0), 0.25, 1e-15);
  EXPECT_EQ(d(1, 0), 0.0);
  EXPECT_NEAR(d(2, 0), 0.75, 1e-15);
  EXPECT_NEAR(d(0, 1), 0.5, 1e-15);  // unreachable user: spread evenly
  EXPECT_EQ(d(1, 1), 0.0);
}

class GreedyGeometry : public ::testing::Test {
 protected:
  void SetUp() override {
    model.n_users = 2;
    model.qos.r_min = 0.5;
    model.qos.p_max = 2000.0;
    uav = {{75, 75, 15}, Vec3::Zero(), 0};
    users = {{75, 75, 0}, {85, 75, 0}};
    channels.true_gain = channel_matrix(uav.position, users, model.optics, model.dimming.n_leds);
    channels.est_gain = channels.true_gain;
    channels.noise_var = Eigen::VectorXd::Constant(2, model.receiver.noise_var);
    channels.uncertainty_radius = 0.02 * channels.true_gain.minCoeff();
    const int na = active_led_count(model.dimming.eta, model.dimming.n_leds);
    i_dc = dc_bias_for(model.dimming, na);
    leds = select_leds(std::vector<double>(static_cast<std::size_t>(model.dimming.n_leds), 0.0), na);
  }
  SystemModel model;
  UavState uav;
  std::vector<Position> users;
  ChannelState channels;
  double i_dc = 0.0;
  LedSelection leds;
};

TEST_F(GreedyGeometry, SingleUserBeamFollowsTheChannel) {
  model.n_users = 1;
  ChannelState one = channels;
  one.true_gain = one.est_gain = channels.true_gain.leftCols(1);
  one.noise_var = channels.noise_var.head(1);
  const BeamPlan plan = greedy_beams(one, leds, i_dc, hover_power(model.rotor).total, model, std::vector<int>{0});
  const Eigen::MatrixXd d = greedy_directions(one.est_gain, leds);
  const double amp = plan.beam.w.col(0).sum();
  ASSERT_GT(amp, 0.0);
  EXPECT_LT((plan.beam.w.col(0) / amp - d.col(0)).norm(), 1e-12);
  EXPECT_TRUE(plan.certified);
}

TEST_F(GreedyGeometry, CertificateHoldsAcrossTheErrorBox) {
  const std::vector<int> order = greedy_order(channels, leds);
  const BeamPlan plan = greedy_beams(channels, leds, i_dc, hover_power(model.rotor).total, model, order);
  ASSERT_TRUE(plan.certified);
  AllocationAction a;
  a.beam = plan.beam;
  a.leds = leds;
  a.i_dc = i_dc;
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    ChannelState perturbed = channels;
    perturbed.true_gain = perturb_csi(channels.est_gain, channels.uncertainty_radius, rng);
    const FeasibilityReport f = check_p1_feasibility(a, perturbed, uav, model);
    EXPECT_TRUE(f[1]);
    EXPECT_TRUE(f[3]);
  }
}

TEST(GreedyEpisode, MeetsRowBoundLedCountAndDimming) {
  SystemModel m;
  m.n_users = 3;
  m.flight.n_slots = 10;
  Environment env(m);
  Rng rng(5);
  for (int episode = 0; episode < 5; ++episode) {
    env.reset(sample_task(m, rng));
    while (!env.done()) {
      const AllocationAction a = greedy_action(env);
      const SlotEvaluation ev = evaluate_slot(a, env.channels(), env.uav(), env.episode_model());
      EXPECT_TRUE(ev.feasibility[3]);
      EXPECT_TRUE(ev.feasibility[8]);
      EXPECT_TRUE(ev.feasibility[9]);
      env.apply(a);
    }
  }
}

TEST(RandomBaseline, DeterministicPerSeed) {
  SystemModel m;
  m.n_users = 2;
  m.flight.n_slots = 8;
  Environment env(m);
  Rng task_rng(1);
  const Task task = sample_task(m, task_rng);
  Rng a(9), b(9);
  const EpisodeTrace ta = baseline_random(env, task, a);
  const EpisodeTrace tb = baseline_random(env, task, b);
  ASSERT_EQ(ta.slots.size(), 8u);
  for (std::size_t i = 0; i < ta.slots.size(); ++i) {
    EXPECT_EQ(ta.slots[i].reward, tb.slots[i].reward);
    EXPECT_EQ(ta.slots[i].position, tb.slots[i].position);
  }
}

TEST(GreedyConfig, Validation) {
  GreedyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.fov_fill = 0.0;
  EXPECT_THROW(c.validate(), std::range_error);
}

}  // namespace
}  // namespace uavvlc
