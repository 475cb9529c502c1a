// Command line front end: single episodes, training, meta-training,
// adaptation, evaluation, sweeps and the invariant self-check.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "uavvlc/baselines.hpp"
#include "uavvlc/checkpoint.hpp"
#include "uavvlc/config.hpp"
#include "uavvlc/experiment.hpp"
#include "uavvlc/invariants.hpp"
#include "uavvlc/meta_sac.hpp"
#include "uavvlc/trace.hpp"
#include "uavvlc/training.hpp"

using namespace uavvlc;

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string scheme;
  bool zero_penalty = false;
  std::string checkpoint;
  int threads = 1;
  std::string var;
  std::vector<double> values;
  int seeds = 0;
  std::vector<std::string> schemes;
};

SystemConfig load(const Options& o) {
  SystemConfig cfg = o.config.empty() ? parse_config("", "<defaults>") : load_config(o.config);
  if (o.zero_penalty) {
    cfg.env.reward_mode = RewardMode::zero_penalty;
    cfg.env.observation_mode = ObservationMode::channels_only;
  }
  for (const std::string& note : config_notes(cfg)) spdlog::warn("{}", note);
  spdlog::info("config hash {}", config_hash_hex(cfg));
  return cfg;
}

std::filesystem::path require_out(const Options& o, const char* what) {
  if (o.out.empty()) throw CLI::ValidationError("--out", std::string("required for ") + what);
  return o.out;
}

Task first_task(const SystemConfig& cfg, std::uint64_t seed) {
  SystemConfig one = cfg;
  one.experiment.eval_tasks = 1;
  return evaluation_tasks(one, seed).front();
}

int cmd_simulate(const Options& o) {
  const SystemConfig cfg = load(o);
  Environment env(cfg.model, cfg.env);
  const Task task = first_task(cfg, o.seed);
  const Scheme scheme = parse_scheme(o.scheme.empty() ? "greedy" : o.scheme);
  EpisodeTrace trace;
  Rng rng(derive_seed(o.seed, 1));
  switch (scheme) {
    case Scheme::greedy: trace = baseline_greedy(env, task, cfg.greedy); break;
    case Scheme::random: trace = baseline_random(env, task, rng); break;
    case Scheme::sac:
    case Scheme::meta_sac: {
      if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint", "learned schemes need a SAC checkpoint");
      trace = run_policy(load_checkpoint(o.checkpoint), env, task);
      break;
    }
  }
  std::ofstream out(require_out(o, "simulate"));
  if (!out) throw std::runtime_error("cannot open " + o.out);
  write_trace_csv(out, trace, config_hash_hex(cfg));
  spdlog::info("{}: mean P_Tot {:.3f} W, mean sum rate {:.4f}, feasible {:.2f}", to_string(scheme),
               trace.mean_total_power(), trace.mean_sum_rate(), trace.feasible_fraction());
  return 0;
}

int cmd_train(const Options& o) {
  const SystemConfig cfg = load(o);
  const auto path = require_out(o, "train");
  Environment env(cfg.model, cfg.env);
  Rng rng(derive_seed(o.seed, 2));
  SacAgent agent(env.observation_dim(), env.action_dim(), cfg.sac, rng);
  ReplayBuffer buffer(cfg.train.buffer_capacity);
  const TrainingLog log = train_sac(agent, env, task_sampler(cfg), cfg.train, buffer, rng);
  for (std::size_t e = 0; e < log.episode_reward.size(); ++e) {
    spdlog::info("episode {} reward {:.3f} power {:.3f} feasible {:.2f}", e, log.episode_reward[e],
                 log.episode_power[e], log.episode_feasible[e]);
  }
  save_checkpoint(path, agent);
  spdlog::info("saved {}", path.string());
  return 0;
}

int cmd_meta_train(const Options& o) {
  const SystemConfig cfg = load(o);
  const auto path = require_out(o, "meta-train");
  const MetaState state = train_meta(cfg, o.seed, [](const MetaState& s) {
    if (s.iteration % 10 == 0) spdlog::info("meta-iteration {} query loss {:.5g}", s.iteration, s.query_loss.back());
  });
  save_meta_checkpoint(path, state);
  spdlog::info("saved {}", path.string());
  return 0;
}

int cmd_adapt(const Options& o) {
  const SystemConfig cfg = load(o);
  const auto path = require_out(o, "adapt");
  if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint", "adapt needs a meta checkpoint");
  const MetaState meta = load_meta_checkpoint(o.checkpoint, cfg.meta.task_buffer_capacity);
  Environment env(cfg.model, cfg.env);
  const Task task = first_task(cfg, o.seed);
  Rng rng(derive_seed(o.seed, 3));
  const SacAgent agent = meta_adapt(meta.global, env, task, cfg.meta, cfg.adapt, rng);
  const EpisodeTrace trace = run_policy(agent, env, task);
  spdlog::info("adapted: mean P_Tot {:.3f} W, feasible {:.2f}", trace.mean_total_power(), trace.feasible_fraction());
  save_checkpoint(path, agent);
  spdlog::info("saved {}", path.string());
  return 0;
}

int cmd_eval(const Options& o) {
  const SystemConfig cfg = load(o);
  const Scheme scheme = parse_scheme(o.scheme.empty() ? "greedy" : o.scheme);
  const double value = cfg.experiment.values.front();
  const ResultRow row = run_point(cfg, scheme, value, o.seed);
  std::cout << "# config_hash=" << config_hash_hex(cfg) << '\n' << csv_header() << '\n' << format_row(row) << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  SystemConfig cfg = load(o);
  if (!o.var.empty()) cfg.experiment.variable = parse_sweep_variable(o.var);
  if (!o.values.empty()) cfg.experiment.values = o.values;
  if (o.seeds > 0) cfg.experiment.seeds = o.seeds;
  if (!o.schemes.empty()) {
    cfg.experiment.schemes.clear();
    for (const auto& s : o.schemes) cfg.experiment.schemes.push_back(parse_scheme(s));
  } else if (!o.scheme.empty()) {
    cfg.experiment.schemes = {parse_scheme(o.scheme)};
  }
  if (!o.out.empty()) cfg.experiment.output = o.out;
  cfg.experiment.validate();
  spdlog::info("sweep {} over {} values x {} seeds x {} schemes -> {}", to_string(cfg.experiment.variable),
               cfg.experiment.values.size(), cfg.experiment.seeds, cfg.experiment.schemes.size(),
               cfg.experiment.output);
  const RunSummary s = run_experiment(cfg, cfg.experiment.output, o.threads, [](const ResultRow& r) {
    spdlog::info("{}", format_row(r));
  });
  spdlog::info("{} rows written, {} already present", s.written, s.skipped);
  return 0;
}

int cmd_check(const Options& o) {
  const SystemConfig cfg = load(o);
  bool ok = true;
  for (const InvariantResult& r : run_invariants(cfg, o.seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV visible-light downlink simulator and learners"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "YAML config (defaults when omitted)")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--out", o.out, "output path");
  app.add_option("--scheme", o.scheme, "meta-sac | sac | greedy | random");
  app.add_flag("--zero-penalty", o.zero_penalty, "zero reward for infeasible slots, channels-only state");

  auto* simulate = app.add_subcommand("simulate", "one episode, per-slot trace CSV");
  simulate->add_option("--checkpoint", o.checkpoint, "SAC checkpoint for learned schemes");
  app.add_subcommand("train", "plain SAC on the task distribution");
  app.add_subcommand("meta-train", "meta-training; writes a meta checkpoint");
  auto* adapt = app.add_subcommand("adapt", "meta-adaptation on a fresh task");
  adapt->add_option("--checkpoint", o.checkpoint, "meta checkpoint")->required();
  app.add_subcommand("eval", "one result row for (scheme, first sweep value, seed)");
  auto* sweep = app.add_subcommand("sweep", "experiment driver; appends rows to a CSV");
  sweep->add_option("--var", o.var, "users | p_max | r_min | n_leds");
  sweep->add_option("--values", o.values, "sweep values");
  sweep->add_option("--seeds", o.seeds, "seeds per point");
  sweep->add_option("--schemes", o.schemes, "scheme list");
  sweep->add_option("--threads", o.threads, "concurrent sweep points")->check(CLI::PositiveNumber);
  app.add_subcommand("check", "invariant self-check");

  CLI11_PARSE(app, argc, argv);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "simulate") return cmd_simulate(o);
    if (name == "train") return cmd_train(o);
    if (name == "meta-train") return cmd_meta_train(o);
    if (name == "adapt") return cmd_adapt(o);
    if (name == "eval") return cmd_eval(o);
    if (name == "sweep") return cmd_sweep(o);
    if (name == "check") return cmd_check(o);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
