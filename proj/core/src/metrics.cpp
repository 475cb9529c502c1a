#include "uavvlc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavvlc {

void SystemModel::validate() const {
  optics.validate();
  dimming.validate();
  flight.validate();
  rotor.validate();
  if (!(receiver.noise_var > 0.0)) throw std::range_error("noise variance must be positive");
  if (!(receiver.csi_radius >= 0.0)) throw std::range_error("CSI uncertainty radius must be >= 0");
  if (!(receiver.user_height >= 0.0)) throw std::range_error("user height must be >= 0");
  if (!(qos.r_min > 0.0)) throw std::range_error("R_min must be positive");
  if (!(qos.p_max > 0.0)) throw std::range_error("P_max must be positive");
  if (!(power.amp_efficiency >= 0.0 && power.conversion_factor >= 0.0 && power.circuit_power >= 0.0)) {
    throw std::range_error("power model coefficients must be >= 0");
  }
  if (n_users < 1) throw std::range_error("need at least one user");
}

bool FeasibilityReport::all() const {
  return std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
}

std::string FeasibilityReport::bits() const {
  std::string s;
  for (bool b : ok) s.push_back(b ? '1' : '0');
  return s;
}

Eigen::MatrixXd effective_gains(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a) {
  if (h.rows() != w.w.rows() || h.rows() != a.size() || h.cols() != w.w.cols()) {
    throw std::invalid_argument("effective_gains: dimension mismatch");
  }
  return h.transpose() * a.mask().asDiagonal() * w.w;
}

std::vector<int> order_users(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a) {
  const Eigen::MatrixXd g = effective_gains(h, w, a);
  std::vector<int> order(static_cast<std::size_t>(g.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    return g(l, l) * g(l, l) < g(r, r) * g(r, r);
  });
  return order;
}

RateReport per_user_rate(const Eigen::MatrixXd& h, const Beamformer& w, const LedSelection& a,
                         const Eigen::VectorXd& noise_var, std::span<const int> order) {
  const Eigen::MatrixXd g = effective_gains(h, w, a);
  const auto k_users = static_cast<std::size_t>(g.rows());
  if (order.size() != k_users || static_cast<std::size_t>(noise_var.size()) != k_users) {
    throw std::invalid_argument("per_user_rate: order/noise length mismatch");
  }

  RateReport report;
  report.rates.assign(k_users, 0.0);
  report.order.assign(order.begin(), order.end());
  for (std::size_t j = 0; j < k_users; ++j) {
    const int k = order[j];
    const double signal = g(k, k) * g(k, k);
    double interference = 0.0;
    for (std::size_t q = j + 1; q < k_users; ++q) {
      const double c = g(k, order[q]);
      interference += c * c;
    }
    report.rates[static_cast<std::size_t>(k)] = std::log2(1.0 + signal / (interference + noise_var(k)));
  }
  report.sum_rate = std::accumulate(report.rates.begin(), report.rates.end(), 0.0);
  return report;
}

PowerBreakdown total_power(const Beamformer& w, const LedSelection& a, double i_dc, double p_prop,
                           const PowerConfig& cfg) {
  PowerBreakdown p;
  p.transmit = cfg.amp_efficiency * (a.mask().asDiagonal() * w.w.cwiseAbs()).sum();
  p.bias = cfg.conversion_factor * a.active_count() * i_dc;
  p.circuit = cfg.circuit_power;
  p.propulsion = p_prop;
  p.total = p.transmit + p.bias + p.circuit + p.propulsion;
  return p;
}

double energy_efficiency(const RateReport& rates, const PowerBreakdown& power) {
  if (!(power.total > 0.0)) throw std::domain_error("energy_efficiency: total power must be positive");
  return rates.sum_rate / power.total;
}

SlotEvaluation evaluate_slot(const AllocationAction& action, const ChannelState& channels,
                             const UavState& uav, const SystemModel& model) {
  SlotEvaluation ev;
  const auto order = order_users(channels.true_gain, action.beam, action.leds);
  ev.rates = per_user_rate(channels.true_gain, action.beam, action.leds, channels.noise_var, order);
  ev.power = total_power(action.beam, action.leds, action.i_dc, propulsion_power(action.velocity, model.rotor),
                         model.power);
  ev.energy_efficiency = energy_efficiency(ev.rates, ev.power);

  auto& ok = ev.feasibility.ok;
  ok[0] = std::all_of(ev.rates.rates.begin(), ev.rates.rates.end(),
                      [&](double r) { return r >= model.qos.r_min * (1.0 - 1e-12); });
  ok[1] = ev.power.total <= model.qos.p_max * (1.0 + 1e-12);

  const double bound = beamforming_bound(action.i_dc, model.dimming.i_low, model.dimming.i_high);
  const Eigen::VectorXd row_sums = action.beam.w.cwiseAbs().rowwise().sum();
  ok[2] = (row_sums.array() <= bound * (1.0 + 1e-9)).all();

  const auto violated = check_flight(uav, action.velocity, model.flight);
  const auto breaks = [&](FlightConstraint c) {
    return std::find(violated.begin(), violated.end(), c) != violated.end();
  };
  ok[3] = !breaks(FlightConstraint::kinematics) && !breaks(FlightConstraint::return_to_start);
  ok[4] = !breaks(FlightConstraint::bounds);
  ok[5] = !breaks(FlightConstraint::acceleration);
  ok[6] = !breaks(FlightConstraint::speed);

  const int n_active = action.leds.active_count();
  ok[7] = n_active > 0 &&
          std::abs(dimming_level_of(n_active, action.i_dc, model.dimming) - model.dimming.eta) <= 1e-9;
  ok[8] = action.leds.is_binary() && action.leds.size() == model.dimming.n_leds &&
          n_active == active_led_count(model.dimming.eta, model.dimming.n_leds);
  return ev;
}

}  // namespace uavvlc
