#include "uavvlc/dimming.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavvlc {

void DimmingConfig::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::range_error("dimming level eta must lie in (0, 1]");
  if (!(i_low >= 0.0 && i_low < i_high)) throw std::range_error("need 0 <= I_l < I_h");
  if (n_leds < 1) throw std::range_error("LED array needs at least one LED");
}

int LedSelection::active_count() const {
  return std::accumulate(a.begin(), a.end(), 0, [](int s, std::uint8_t v) { return s + v; });
}

bool LedSelection::is_binary() const {
  return std::all_of(a.begin(), a.end(), [](std::uint8_t v) { return v <= 1; });
}

Eigen::VectorXd LedSelection::mask() const {
  Eigen::VectorXd m(size());
  for (int n = 0; n < size(); ++n) m(n) = a[static_cast<std::size_t>(n)];
  return m;
}

int active_led_count(double eta, int n_leds) {
  // The epsilon absorbs representation error in products such as 0.15 * 10.
  const double scaled = eta * static_cast<double>(n_leds);
  const int rounded = static_cast<int>(std::floor(scaled + 0.5 + 1e-9));
  return std::clamp(rounded, 1, n_leds);
}

double dc_bias_for(const DimmingConfig& cfg, int n_active) {
  if (n_active < 1) throw std::invalid_argument("dc_bias_for: need at least one active LED");
  const double i_dc =
      cfg.eta * cfg.n_leds * (cfg.i_bias0() - cfg.i_low) / static_cast<double>(n_active) + cfg.i_low;
  if (i_dc > cfg.i_high * (1.0 + 1e-12)) {
    throw std::range_error("dc_bias_for: dimming level needs a bias above I_h");
  }
  return i_dc;
}

double dimming_level_of(int n_active, double i_dc, const DimmingConfig& cfg) {
  return static_cast<double>(n_active) * (i_dc - cfg.i_low) /
         (static_cast<double>(cfg.n_leds) * (cfg.i_bias0() - cfg.i_low));
}

double beamforming_bound(double i_dc, double i_low, double i_high) {
  return std::max(0.0, std::min(i_dc - i_low, i_high - i_dc));
}

Beamformer project_beamformer(const Eigen::MatrixXd& raw, double bound, const LedSelection& sel) {
  if (bound < 0.0) throw std::invalid_argument("project_beamformer: negative bound");
  if (raw.rows() != sel.size()) throw std::invalid_argument("project_beamformer: row/selection mismatch");

  Beamformer out{raw};
  for (Eigen::Index n = 0; n < raw.rows(); ++n) {
    if (sel.a[static_cast<std::size_t>(n)] == 0) {
      out.w.row(n).setZero();
      continue;
    }
    const double row_sum = out.w.row(n).cwiseAbs().sum();
    if (row_sum > bound) out.w.row(n) *= bound / row_sum;
  }
  return out;
}

LedSelection select_leds(std::span<const double> scores, int n_active) {
  const int n = static_cast<int>(scores.size());
  if (n_active < 0 || n_active > n) throw std::invalid_argument("select_leds: n_active out of range");

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int l, int r) { return scores[static_cast<std::size_t>(l)] > scores[static_cast<std::size_t>(r)]; });

  LedSelection sel{std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)};
  for (int i = 0; i < n_active; ++i) sel.a[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
  return sel;
}

}  // namespace uavvlc
