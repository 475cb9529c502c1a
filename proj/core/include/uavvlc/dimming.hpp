#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace uavvlc {

/// Hybrid (analog + spatial) dimming parameters. Currents in amperes.
struct DimmingConfig {
  double eta = 0.5;      // target dimming level in (0, 1]
  double i_low = 0.0;    // I_l
  double i_high = 0.01;  // I_h
  int n_leds = 10;       // N

  /// Original DC bias with every LED lit at 100% dimming.
  double i_bias0() const { return 0.5 * (i_low + i_high); }
  void validate() const;
};

/// Binary LED on/off vector (the diagonal of the selection matrix).
struct LedSelection {
  std::vector<std::uint8_t> a;

  int size() const { return static_cast<int>(a.size()); }
  int active_count() const;
  bool is_binary() const;
  Eigen::VectorXd mask() const;

  static LedSelection all_on(int n) { return {std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1)}; }
};

/// N x K precoder in amperes per unit symbol.
struct Beamformer {
  Eigen::MatrixXd w;
};

/// N_a = round-half-up(eta N), never below one LED.
int active_led_count(double eta, int n_leds);

/// Uniform DC bias that keeps the target dimming level with n_active LEDs lit.
/// Throws std::invalid_argument for n_active < 1 and std::range_error when the
/// resulting bias would exceed I_h.
double dc_bias_for(const DimmingConfig& cfg, int n_active);

/// Dimming level delivered by n_active LEDs at bias i_dc; inverse of dc_bias_for.
double dimming_level_of(int n_active, double i_dc, const DimmingConfig& cfg);

/// Per-LED amplitude headroom min(I_dc - I_l, I_h - I_dc).
double beamforming_bound(double i_dc, double i_low, double i_high);

/// Masks inactive rows and rescales any row whose absolute sum exceeds the
/// bound back onto it, preserving its direction. Feasible rows pass unchanged.
Beamformer project_beamformer(const Eigen::MatrixXd& raw, double bound, const LedSelection& sel);

/// Lights the n_active LEDs with the largest scores; ties go to the lower index.
LedSelection select_leds(std::span<const double> scores, int n_active);

}  // namespace uavvlc
