#include "uavvlc/invariants.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "uavvlc/baselines.hpp"
#include "uavvlc/experiment.hpp"
#include "uavvlc/training.hpp"

namespace uavvlc {

namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

InvariantResult closed_forms(const SystemConfig& cfg) {
  const auto& o = cfg.model.optics;
  const double m = lambertian_order(o.half_power_semiangle);
  const double m_ref = -std::numbers::ln2 / std::log(std::cos(o.half_power_semiangle));
  const double g = concentrator_gain(0.0, o);
  const double g_ref = o.refractive_index * o.refractive_index / std::pow(std::sin(o.fov_semiangle), 2);
  const Position uav{0, 0, 10}, user{0, 0, 0};
  const double h = los_channel_gain(uav, user, o);
  const double h_ref = (m_ref + 1) * o.pd_area / (2 * std::numbers::pi * 100.0) * g_ref;
  const int n_a = active_led_count(cfg.model.dimming.eta, cfg.model.dimming.n_leds);
  const double eta_back = dimming_level_of(n_a, dc_bias_for(cfg.model.dimming, n_a), cfg.model.dimming);
  const double hover = hover_power(cfg.model.rotor).total;
  const double prop0 = propulsion_terms(0.0, cfg.model.rotor).total;
  const bool ok = close(m, m_ref, 1e-9) && close(g, g_ref, 1e-9) && close(h, h_ref, 1e-9) &&
                  close(eta_back, cfg.model.dimming.eta, 1e-9) && close(prop0, hover, 1e-9);
  return {"closed-form channel, dimming and power models", ok, "P_Hov = " + fmt("%.10g W", hover)};
}

InvariantResult decoded_actions(const SystemConfig& cfg, std::uint64_t seed) {
  EnvConfig ec = cfg.env;
  ec.velocity_mode = VelocityMode::clamped;
  Environment env(cfg.model, ec);
  Rng rng(seed);
  const TaskSampler sampler = task_sampler(cfg);
  int slots = 0;
  int bad = 0;
  for (int ep = 0; ep < 20; ++ep) {
    env.reset(sampler(rng));
    while (!env.done()) {
      const SlotRecord& r = env.apply(env.decode_action(uniform_action(env.action_dim(), rng)));
      bad += (r.feasibility[3] && r.feasibility[9] && r.feasibility[6] && r.feasibility[7]) ? 0 : 1;
      ++slots;
    }
  }
  return {"decoded actions satisfy C3, C6, C7, C9", bad == 0,
          std::to_string(bad) + " of " + std::to_string(slots) + " slots violated"};
}

InvariantResult greedy_certificate(const SystemConfig& cfg, std::uint64_t seed) {
  Environment env(cfg.model, cfg.env);
  Rng rng(seed);
  const TaskSampler sampler = task_sampler(cfg);
  int certified = 0;
  int broken = 0;
  for (int ep = 0; ep < 5; ++ep) {
    env.reset(sampler(rng));
    while (!env.done()) {
      const AllocationAction a = greedy_action(env, cfg.greedy);
      const SystemModel& model = env.episode_model();
      const std::vector<int> order = greedy_order(env.channels(), a.leds);
      const BeamPlan plan = greedy_beams(env.channels(), a.leds, a.i_dc,
                                         propulsion_power(a.velocity, model.rotor), model, order, cfg.greedy);
      if (plan.certified) {
        ++certified;
        ChannelState est = env.channels();
        est.true_gain = est.est_gain;
        const SlotEvaluation ev = evaluate_slot(a, est, env.uav(), model);
        broken += ev.feasibility[1] ? 0 : 1;
      }
      env.apply(a);
    }
  }
  return {"certified greedy beams meet C1 on estimated channels", broken == 0,
          std::to_string(certified) + " certified slots, " + std::to_string(broken) + " broken"};
}

InvariantResult mlp_gradient(std::uint64_t seed) {
  Rng rng(seed);
  Mlp net({3, 5, 2});
  net.initialize(rng);
  const Eigen::MatrixXd x = standard_normal(3, 4, rng);
  const Eigen::MatrixXd w = standard_normal(2, 4, rng);
  const auto loss = [&](const Mlp& n) { return (n.forward(x).array() * w.array()).sum(); };
  Mlp::Cache cache;
  net.forward(x, cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.parameter_count());
  net.backward(cache, w, grad);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < net.parameter_count(); ++i) {
    Mlp plus = net, minus = net;
    plus.parameters()(i) += 1e-5;
    minus.parameters()(i) -= 1e-5;
    const double fd = (loss(plus) - loss(minus)) / 2e-5;
    worst = std::max(worst, std::abs(fd - grad(i)) / std::max(1e-8, std::abs(fd) + std::abs(grad(i))));
  }
  return {"MLP back-propagation matches finite differences", worst < 1e-4, fmt("worst relative error %.3g", worst)};
}

InvariantResult config_round_trip(const SystemConfig& cfg) {
  const std::string once = dump_config(cfg);
  const std::string twice = dump_config(parse_config(once));
  return {"config dump/load round trip", once == twice, "hash " + config_hash_hex(cfg)};
}

}  // namespace

std::vector<InvariantResult> run_invariants(const SystemConfig& cfg, std::uint64_t seed) {
  std::vector<InvariantResult> out;
  out.push_back(closed_forms(cfg));
  out.push_back(decoded_actions(cfg, derive_seed(seed, 1)));
  out.push_back(greedy_certificate(cfg, derive_seed(seed, 2)));
  out.push_back(mlp_gradient(derive_seed(seed, 3)));
  out.push_back(config_round_trip(cfg));
  return out;
}

}  // namespace uavvlc
