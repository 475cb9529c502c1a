#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "uavvlc/metrics.hpp"

namespace uavvlc {
namespace {

// K x K effective gains are h^T A W; with one LED and h = 1 they equal W's row.
struct ScalarLink {
  Eigen::MatrixXd h;
  Beamformer w;
  LedSelection a = LedSelection::all_on(1);
};

ScalarLink scalar(std::initializer_list<double> amplitudes, std::initializer_list<double> gains) {
  ScalarLink s;
  s.h = Eigen::RowVectorXd::Map(std::vector<double>(gains).data(), static_cast<Eigen::Index>(gains.size()));
  s.w.w = Eigen::RowVectorXd::Map(std::vector<double>(amplitudes).data(),
                                  static_cast<Eigen::Index>(amplitudes.size()));
  return s;
}

TEST(OrderUsers, AscendingEffectiveGain) {
  const ScalarLink s = scalar({2.0, 1.0}, {1.0, 1.0});
  EXPECT_EQ(order_users(s.h, s.w, s.a), (std::vector<int>{1, 0}));
  const ScalarLink tie = scalar({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  EXPECT_EQ(order_users(tie.h, tie.w, tie.a), (std::vector<int>{0, 1, 2}));
  const ScalarLink one = scalar({3.0}, {1.0});
  EXPECT_EQ(order_users(one.h, one.w, one.a), (std::vector<int>{0}));
}

TEST(PerUserRate, SingleUserAtUnitSnr) {
  const ScalarLink s = scalar({1e-3}, {1e-6});
  const Eigen::VectorXd noise = Eigen::VectorXd::Constant(1, 1e-18);
  const RateReport r = per_user_rate(s.h, s.w, s.a, noise, std::vector<int>{0});
  EXPECT_NEAR(r.rates[0], 1.0, 1e-12);
}

TEST(PerUserRate, TwoUserSinr) {
  // User 0 first: signal 3, interference 1 from user 1, noise 1 -> log2(2.5).
  const ScalarLink s = scalar({std::sqrt(3.0), 1.0}, {1.0, 1.0});
  const Eigen::VectorXd noise = Eigen::VectorXd::Ones(2);
  const std::vector<int> order{0, 1};
  const RateReport r = per_user_rate(s.h, s.w, s.a, noise, order);
  EXPECT_NEAR(r.rates[0], 1.3219280948873623, 1e-12);
  EXPECT_NEAR(r.rates[1], 1.0, 1e-12);  // last user: noise only
  EXPECT_NEAR(r.sum_rate, r.rates[0] + r.rates[1], 1e-15);
}

TEST(PerUserRate, NoActiveLedsMeansNoRate) {
  ScalarLink s = scalar({1.0, 2.0}, {1.0, 1.0});
  s.a = LedSelection{{0}};
  const RateReport r = per_user_rate(s.h, s.w, s.a, Eigen::VectorXd::Ones(2), std::vector<int>{0, 1});
  EXPECT_EQ(r.sum_rate, 0.0);
}

TEST(PerUserRate, SumRateInvariantUnderRelabelling) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3, k = 4;
    const Eigen::MatrixXd h = Eigen::MatrixXd::NullaryExpr(n, k, [&] { return uniform(rng, 0, 1); });
    const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(n, k, [&] { return uniform(rng, -1, 1); });
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(k, 0.1);
    const LedSelection a{{1, 0, 1}};
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd hp(n, k), wp(n, k);
    for (int j = 0; j < k; ++j) {
      hp.col(j) = h.col(perm[static_cast<std::size_t>(j)]);
      wp.col(j) = w.col(perm[static_cast<std::size_t>(j)]);
    }
    const RateReport r = per_user_rate(h, {w}, a, noise, order_users(h, {w}, a));
    const RateReport rp = per_user_rate(hp, {wp}, a, noise, order_users(hp, {wp}, a));
    // Exact ties in effective gain are measure-zero here, so the orders agree.
    EXPECT_NEAR(r.sum_rate, rp.sum_rate, 1e-12 * std::max(1.0, r.sum_rate));
  }
}

TEST(PerUserRate, ExtraInterferenceNeverHelps) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd h = Eigen::MatrixXd::NullaryExpr(1, 3, [&] { return uniform(rng, 0.1, 1); });
    Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(1, 3, [&] { return uniform(rng, 0.1, 1); });
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(3, 0.05);
    const LedSelection a = LedSelection::all_on(1);
    const std::vector<int> order{0, 1, 2};
    const RateReport before = per_user_rate(h, {w}, a, noise, order);
    w(0, 2) *= 1.5;  // the last user's beam interferes with both earlier users
    const RateReport after = per_user_rate(h, {w}, a, noise, order);
    EXPECT_LE(after.rates[0], before.rates[0]);
    EXPECT_LE(after.rates[1], before.rates[1]);
  }
}

TEST(TotalPower, FixedTermsOnly) {
  const PowerConfig cfg;
  const Beamformer w{Eigen::MatrixXd::Zero(10, 2)};
  const LedSelection none{std::vector<std::uint8_t>(10, 0)};
  const PowerBreakdown p = total_power(w, none, 0.005, 1438.0, cfg);
  EXPECT_DOUBLE_EQ(p.total, 1.0 + 1438.0);
}

TEST(TotalPower, BiasTerm) {
  const PowerBreakdown p =
      total_power({Eigen::MatrixXd::Zero(10, 2)}, LedSelection::all_on(10), 0.005, 0.0, PowerConfig{});
  EXPECT_NEAR(p.bias, 0.05, 1e-15);
}

TEST(TotalPower, TransmitTermIsLinearAndMasked) {
  const PowerConfig cfg;
  Eigen::MatrixXd w(2, 2);
  w << 0.001, -0.002, 0.003, 0.004;
  const LedSelection a{{1, 0}};
  const PowerBreakdown p1 = total_power({w}, a, 0.0, 0.0, cfg);
  const PowerBreakdown p2 = total_power({2 * w}, a, 0.0, 0.0, cfg);
  EXPECT_NEAR(p1.transmit, 1.2 * 0.003, 1e-15);
  EXPECT_NEAR(p2.transmit, 2 * p1.transmit, 1e-15);
  EXPECT_EQ(p2.bias, p1.bias);
  EXPECT_EQ(p2.circuit, p1.circuit);
}

TEST(EnergyEfficiency, RatioAndGuards) {
  RateReport r;
  r.sum_rate = 2.0;
  PowerBreakdown p;
  p.total = 4.0;
  EXPECT_DOUBLE_EQ(energy_efficiency(r, p), 0.5);
  r.sum_rate = 4.0;
  EXPECT_DOUBLE_EQ(energy_efficiency(r, p), 1.0);
  r.sum_rate = 0.0;
  EXPECT_EQ(energy_efficiency(r, p), 0.0);
  p.total = 0.0;
  EXPECT_THROW(energy_efficiency(r, p), std::domain_error);
}

class FeasibilityTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model.n_users = 2;
    model.qos.p_max = 2000.0;
    const std::vector<Position> users{{75, 75, 0}, {80, 75, 0}};
    uav = {{75, 75, 20}, Vec3::Zero(), 0};
    channels.true_gain = channel_matrix(uav.position, users, model.optics, model.dimming.n_leds);
    channels.est_gain = channels.true_gain;
    channels.noise_var = Eigen::VectorXd::Constant(2, model.receiver.noise_var);
    const int na = active_led_count(model.dimming.eta, model.dimming.n_leds);
    action.i_dc = dc_bias_for(model.dimming, na);
    std::vector<double> scores(static_cast<std::size_t>(model.dimming.n_leds), 0.0);
    action.leds = select_leds(scores, na);
    action.beam.w = Eigen::MatrixXd::Zero(model.dimming.n_leds, 2);
  }
  SystemModel model;
  UavState uav;
  ChannelState channels;
  AllocationAction action;
};

TEST_F(FeasibilityTest, ZeroBeamFailsQos) {
  const FeasibilityReport f = check_p1_feasibility(action, channels, uav, model);
  EXPECT_FALSE(f[1]);
  for (int c = 2; c <= 9; ++c) EXPECT_TRUE(f[c]) << "C" << c;
}

TEST_F(FeasibilityTest, BudgetBoundaryIsInclusive) {
  const SlotEvaluation ev = evaluate_slot(action, channels, uav, model);
  model.qos.p_max = ev.power.total;
  EXPECT_TRUE(check_p1_feasibility(action, channels, uav, model)[2]);
  model.qos.p_max = ev.power.total * (1 - 1e-9);
  EXPECT_FALSE(check_p1_feasibility(action, channels, uav, model)[2]);
}

TEST_F(FeasibilityTest, WrongLedCountFailsSelection) {
  action.leds.a[static_cast<std::size_t>(std::find(action.leds.a.begin(), action.leds.a.end(), 1) -
                                         action.leds.a.begin())] = 0;
  const FeasibilityReport f = check_p1_feasibility(action, channels, uav, model);
  EXPECT_FALSE(f[9]);
  EXPECT_FALSE(f[8]);  // fewer lit LEDs at the same bias no longer give eta
}

TEST_F(FeasibilityTest, RowBoundViolation) {
  action.beam.w.row(0).setConstant(0.004);  // 8 mA against a 5 mA bound
  EXPECT_FALSE(check_p1_feasibility(action, channels, uav, model)[3]);
}

TEST_F(FeasibilityTest, QosUsesTrueChannels) {
  // A stronger second beam with sizeable amplitudes meets C1 on the true
  // channels; corrupting only the estimate must not change the verdict.
  action.beam.w.col(0).setConstant(0.0008);
  action.beam.w.col(1).setConstant(0.0002);
  const bool truth = check_p1_feasibility(action, channels, uav, model)[1];
  channels.est_gain.setZero();
  EXPECT_EQ(check_p1_feasibility(action, channels, uav, model)[1], truth);
}

}  // namespace
}  // namespace uavvlc
