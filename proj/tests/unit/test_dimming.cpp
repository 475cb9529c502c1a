#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "uavvlc/dimming.hpp"
#include "uavvlc/random.hpp"

namespace uavvlc {
namespace {

DimmingConfig dimming(double eta, int n = 10) {
  DimmingConfig c;
  c.eta = eta;
  c.n_leds = n;
  return c;
}

TEST(ActiveLedCount, RoundsHalfUpAndNeverZero) {
  EXPECT_EQ(active_led_count(1.0, 10), 10);
  EXPECT_EQ(active_led_count(0.55, 10), 6);
  EXPECT_EQ(active_led_count(0.5, 10), 5);
  EXPECT_EQ(active_led_count(0.01, 10), 1);
}

TEST(DcBias, ReferenceValues) {
  EXPECT_NEAR(dc_bias_for(dimming(1.0), 10), 0.005, 1e-15);
  EXPECT_NEAR(dc_bias_for(dimming(0.5), 5), 0.005, 1e-15);
  // 0.55 * 10 * 5 mA / 6, from tests/oracles/closed_forms.py.
  EXPECT_NEAR(dc_bias_for(dimming(0.55), 6), 4.583333333333333333e-3, 1e-17);
}

TEST(DcBias, RejectsEmptyArrayAndOverdrive) {
  EXPECT_THROW(dc_bias_for(dimming(0.5), 0), std::invalid_argument);
  // 10 LEDs' worth of light from 2 LEDs would need 25 mA > I_h.
  EXPECT_THROW(dc_bias_for(dimming(1.0), 2), std::range_error);
}

TEST(DimmingLevel, InvertsDcBias) {
  const DimmingConfig c = dimming(0.5);
  EXPECT_NEAR(dimming_level_of(10, 0.005, c), 1.0, 1e-15);
  EXPECT_NEAR(dimming_level_of(6, 0.55 * 10 * 0.005 / 6, c), 0.55, 1e-15);
  EXPECT_NEAR(dimming_level_of(5, 0.005, c), 0.5, 1e-15);
}

TEST(DimmingLevel, RoundTripOverGrid) {
  for (int n = 1; n <= 32; ++n) {
    for (int step = 1; step <= 20; ++step) {
      const double eta = 0.05 * step;
      const DimmingConfig c = dimming(eta, n);
      const int na = active_led_count(eta, n);
      const double bias = dc_bias_for(c, na);
      EXPECT_NEAR(dimming_level_of(na, bias, c), eta, 4 * std::numeric_limits<double>::epsilon()) << n << ' ' << eta;
    }
  }
}

TEST(BeamformingBound, Headroom) {
  EXPECT_NEAR(beamforming_bound(0.005, 0.0, 0.01), 0.005, 1e-18);
  EXPECT_EQ(beamforming_bound(0.01, 0.0, 0.01), 0.0);
  const double i_dc = 0.55 * 10 * 0.005 / 6;
  EXPECT_NEAR(beamforming_bound(i_dc, 0.0, 0.01), i_dc, 1e-18);
}

TEST(ProjectBeamformer, FeasibleInputUnchanged) {
  Eigen::MatrixXd w(2, 2);
  w << 0.3, -0.2, 0.1, 0.4;
  const Beamformer out = project_beamformer(w, 0.5, LedSelection::all_on(2));
  EXPECT_EQ((out.w - w).norm(), 0.0);
}

TEST(ProjectBeamformer, ScalesRowOntoBound) {
  Eigen::MatrixXd w(1, 2);
  w << 2.0, 2.0;
  const Beamformer out = project_beamformer(w, 2.0, LedSelection::all_on(1));
  EXPECT_DOUBLE_EQ(out.w(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out.w(0, 1), 1.0);
}

TEST(ProjectBeamformer, MasksInactiveRows) {
  const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(2, 3, 0.7);
  const Beamformer out = project_beamformer(w, 10.0, LedSelection{{1, 0}});
  EXPECT_EQ(out.w.row(1).norm(), 0.0);
  EXPECT_EQ((out.w.row(0) - w.row(0)).norm(), 0.0);
}

TEST(ProjectBeamformer, RandomMatricesSatisfyRowBound) {
  Rng rng(17);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int k = 1 + static_cast<int>(rng() % 6);
    Eigen::MatrixXd w(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) w(i, j) = uniform(rng, -3, 3);
    LedSelection sel;
    for (int i = 0; i < n; ++i) sel.a.push_back(static_cast<std::uint8_t>(rng() & 1));
    const double bound = uniform(rng, 0.0, 2.0);
    const Beamformer out = project_beamformer(w, bound, sel);
    for (int i = 0; i < n; ++i) {
      EXPECT_LE(out.w.row(i).cwiseAbs().sum(), bound * (1 + 1e-12));
      if (sel.a[static_cast<std::size_t>(i)] == 0) EXPECT_EQ(out.w.row(i).norm(), 0.0);
    }
  }
}

TEST(ProjectBeamformer, SignalStaysInsideCurrentRange) {
  Rng rng(23);
  const DimmingConfig c = dimming(0.55);
  const int na = active_led_count(c.eta, c.n_leds);
  const double i_dc = dc_bias_for(c, na);
  const double bound = beamforming_bound(i_dc, c.i_low, c.i_high);
  const int k = 3;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::MatrixXd raw = Eigen::MatrixXd::NullaryExpr(c.n_leds, k, [&] { return uniform(rng, -1, 1); }) * bound;
    const Beamformer w = project_beamformer(raw, bound, LedSelection::all_on(c.n_leds));
    for (int corner = 0; corner < (1 << k); ++corner) {
      Eigen::VectorXd s(k);
      for (int j = 0; j < k; ++j) s(j) = (corner >> j & 1) ? 1.0 : -1.0;
      const Eigen::VectorXd x = w.w * s + Eigen::VectorXd::Constant(c.n_leds, i_dc);
      EXPECT_GE(x.minCoeff(), c.i_low - 1e-15);
      EXPECT_LE(x.maxCoeff(), c.i_high + 1e-15);
    }
  }
}

TEST(SelectLeds, Examples) {
  const std::vector<double> s{0.9, 0.1, 0.5};
  EXPECT_EQ(select_leds(s, 2).a, (std::vector<std::uint8_t>{1, 0, 1}));
  const std::vector<double> flat(5, 0.3);
  EXPECT_EQ(select_leds(flat, 1).a, (std::vector<std::uint8_t>{1, 0, 0, 0, 0}));
  EXPECT_EQ(select_leds(s, 3).a, (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_THROW(select_leds(s, 4), std::invalid_argument);
}

// Brute force: the chosen subset has the largest score sum, and among equal
// sums the lexicographically smallest index set.
TEST(SelectLeds, MatchesExhaustiveSearch) {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int na = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    std::vector<double> s(static_cast<std::size_t>(n));
    // Coarse values so ties are common.
    for (double& v : s) v = std::round(uniform(rng, -2, 2) * 2) / 2;

    double best = -1e300;
    std::vector<std::uint8_t> best_set;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != na) continue;
      double sum = 0.0;
      std::vector<std::uint8_t> set(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          sum += s[static_cast<std::size_t>(i)];
          set[static_cast<std::size_t>(i)] = 1;
        }
      }
      // Lexicographically larger 0/1 vector means lower indices are used.
      if (sum > best || (sum == best && set > best_set)) {
        best = sum;
        best_set = set;
      }
    }
    const LedSelection got = select_leds(s, na);
    EXPECT_EQ(got.active_count(), na);
    EXPECT_EQ(got.a, best_set);
  }
}

}  // namespace
}  // namespace uavvlc
