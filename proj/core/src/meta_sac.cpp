#include "uavvlc/meta_sac.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "uavvlc/checkpoint.hpp"

namespace uavvlc {

void MetaConfig::validate() const {
  if (n_tasks < 1) throw std::range_error("meta task count must be >= 1");
  if (iterations < 0) throw std::range_error("meta iterations must be >= 0");
  if (inner_steps < 0) throw std::range_error("inner steps must be >= 0");
  if (!(support_fraction > 0.0 && support_fraction < 1.0)) {
    throw std::range_error("support fraction must be in (0, 1)");
  }
  if (warmup_episodes < 0 || episodes_per_iteration < 0) throw std::range_error("episode counts must be >= 0");
  if (task_buffer_capacity == 0) throw std::range_error("task buffer capacity must be positive");
  for (double lr : {inner_lr_actor, inner_lr_critic, adapt_lr_actor, adapt_lr_critic1, adapt_lr_critic2}) {
    if (!(lr >= 0.0)) throw std::range_error("learning rates must be >= 0");
  }
}

void TaskBuffer::resplit(double support_fraction, Rng& rng) {
  const std::size_t n = data_.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_support = static_cast<std::size_t>(std::llround(support_fraction * static_cast<double>(n)));
  if (n >= 2) n_support = std::clamp<std::size_t>(n_support, 1, n - 1);
  else n_support = n;
  support_.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_support));
  query_.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_support), idx.end());
}

Batch TaskBuffer::sample_from(const std::vector<std::size_t>& pool, std::size_t n, Rng& rng) const {
  if (pool.empty()) throw std::logic_error("TaskBuffer: split is empty; call resplit() after collecting data");
  const auto pick = sample_without_replacement(pool.size(), std::min(n, pool.size()), rng);
  std::vector<Transition> ts;
  ts.reserve(pick.size());
  for (std::size_t i : pick) ts.push_back(data_.at(pool[i]));
  return make_batch(ts);
}

Batch TaskBuffer::sample_support(std::size_t n, Rng& rng) const { return sample_from(support_, n, rng); }
Batch TaskBuffer::sample_query(std::size_t n, Rng& rng) const { return sample_from(query_, n, rng); }

SacAgent inner_adapt(const SacAgent& global, const TaskBuffer& buffer, const MetaConfig& cfg, Rng& rng) {
  SacAgent start = global;
  start.hyper().lr_actor = cfg.inner_lr_actor;
  start.hyper().lr_critic1 = cfg.inner_lr_critic;
  start.hyper().lr_critic2 = cfg.inner_lr_critic;
  start.reset_optimizers();
  const auto batch = static_cast<std::size_t>(global.hyper().batch_size);
  return adapt_copy(start, cfg.inner_steps, [&](SacAgent& a) { a.update(buffer.sample_support(batch, rng), rng); });
}

SacGradients outer_update(SacAgent& global, std::span<const SacAgent> adapted, std::span<const Batch> query,
                          Rng& rng) {
  if (adapted.empty()) throw std::invalid_argument("outer_update: no adapted tasks");
  if (adapted.size() != query.size()) throw std::invalid_argument("outer_update: task/query count mismatch");
  SacGradients total = SacGradients::zeros_like(global.networks());
  for (std::size_t t = 0; t < adapted.size(); ++t) {
    total += sac_gradients(adapted[t].networks(), query[t], rng, global.hyper());
  }
  global.apply_gradients(total);
  return total;
}

namespace {

void collect(Environment& env, const Task& task, const PolicyFn& policy, TaskBuffer& buffer, int episodes) {
  for (int e = 0; e < episodes; ++e) rollout(env, task, policy, &buffer.data());
}

}  // namespace

MetaState meta_train(Environment& env, const TaskSampler& sampler, const SacHyper& hyper, const MetaConfig& cfg,
                     std::uint64_t seed, const MetaProgress& progress) {
  cfg.validate();
  Rng init_rng(derive_seed(seed, 1));
  MetaState s{SacAgent(env.observation_dim(), env.action_dim(), hyper, init_rng), {}, {}, 0, seed, {}};
  Rng task_rng(derive_seed(seed, 2));
  for (int t = 0; t < cfg.n_tasks; ++t) {
    s.tasks.push_back(sampler(task_rng));
    s.buffers.emplace_back(cfg.task_buffer_capacity);
  }
  for (int t = 0; t < cfg.n_tasks; ++t) {
    Rng r(derive_seed(seed, 100 + static_cast<std::uint64_t>(t)));
    const int dim = env.action_dim();
    collect(env, s.tasks[static_cast<std::size_t>(t)], [&](const Eigen::VectorXd&) { return uniform_action(dim, r); },
            s.buffers[static_cast<std::size_t>(t)], cfg.warmup_episodes);
  }
  meta_train_more(s, env, cfg, cfg.iterations, progress);
  return s;
}

void meta_train_more(MetaState& s, Environment& env, const MetaConfig& cfg, int iterations,
                     const MetaProgress& progress) {
  cfg.validate();
  const auto batch = static_cast<std::size_t>(s.global.hyper().batch_size);
  for (int i = 0; i < iterations; ++i) {
    const std::uint64_t iter_seed = derive_seed(s.seed, 1000 + static_cast<std::uint64_t>(s.iteration));
    std::vector<SacAgent> adapted;
    std::vector<Batch> query;
    adapted.reserve(s.tasks.size());
    for (std::size_t t = 0; t < s.tasks.size(); ++t) {
      Rng r(derive_seed(iter_seed, t));
      collect(env, s.tasks[t], [&](const Eigen::VectorXd& obs) { return s.global.act(obs, r).action; },
              s.buffers[t], cfg.episodes_per_iteration);
      if (s.buffers[t].data().size() < 2) throw std::logic_error("meta_train: task buffer needs >= 2 transitions");
      s.buffers[t].resplit(cfg.support_fraction, r);
      adapted.push_back(inner_adapt(s.global, s.buffers[t], cfg, r));
      query.push_back(s.buffers[t].sample_query(batch, r));
    }
    Rng outer_rng(derive_seed(iter_seed, 0xffff));
    const SacGradients g = outer_update(s.global, adapted, query, outer_rng);
    s.query_loss.push_back(g.critic1_loss + g.critic2_loss + g.actor_loss);
    ++s.iteration;
    if (progress) progress(s);
  }
}

SacAgent meta_adapt(const SacAgent& global, Environment& env, const Task& task, const MetaConfig& cfg,
                    const TrainConfig& budget, Rng& rng) {
  SacAgent agent = global;
  agent.hyper().lr_actor = cfg.adapt_lr_actor;
  agent.hyper().lr_critic1 = cfg.adapt_lr_critic1;
  agent.hyper().lr_critic2 = cfg.adapt_lr_critic2;
  agent.reset_optimizers();
  ReplayBuffer d_ada(budget.buffer_capacity);
  train_sac(agent, env, task, budget, d_ada, rng);
  return agent;
}

void write_meta_state(std::ostream& out, const MetaState& s) {
  write_agent(out, s.global);
  out << "meta-manifest " << kCheckpointVersion << '\n';
  out << "seed " << s.seed << '\n';
  out << "iteration " << s.iteration << '\n';
  out << "tasks " << s.tasks.size() << '\n';
  for (const Task& t : s.tasks) {
    out << "task " << t.seed << ' ' << ckpt::hex(t.q_init.x) << ' ' << ckpt::hex(t.q_init.y) << ' '
        << ckpt::hex(t.q_init.z) << ' ' << t.users.size();
    for (const Position& u : t.users) out << ' ' << ckpt::hex(u.x) << ' ' << ckpt::hex(u.y) << ' ' << ckpt::hex(u.z);
    out << '\n';
  }
  out << "query_loss " << s.query_loss.size();
  for (double q : s.query_loss) out << ' ' << ckpt::hex(q);
  out << "\nend-meta\n";
}

MetaState read_meta_state(std::istream& in, std::size_t buffer_capacity) {
  SacAgent global = read_agent(in);
  ckpt::expect(in, "meta-manifest");
  if (ckpt::next_token(in) != std::to_string(kCheckpointVersion)) {
    throw std::runtime_error("checkpoint: unsupported meta-manifest version");
  }
  const auto u64 = [&](const std::string& tok) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw std::runtime_error("checkpoint: bad unsigned integer '" + tok + "'");
    }
  };
  const auto real = [&] { return ckpt::parse_real(ckpt::next_token(in)); };
  ckpt::expect(in, "seed");
  MetaState s{std::move(global), {}, {}, 0, u64(ckpt::next_token(in)), {}};
  ckpt::expect(in, "iteration");
  s.iteration = static_cast<std::int64_t>(u64(ckpt::next_token(in)));
  ckpt::expect(in, "tasks");
  const std::uint64_t n_tasks = u64(ckpt::next_token(in));
  if (n_tasks > 1'000'000) throw std::runtime_error("checkpoint: implausible task count");
  for (std::uint64_t t = 0; t < n_tasks; ++t) {
    ckpt::expect(in, "task");
    Task task;
    task.seed = u64(ckpt::next_token(in));
    task.q_init.x = real();
    task.q_init.y = real();
    task.q_init.z = real();
    const std::uint64_t n_users = u64(ckpt::next_token(in));
    if (n_users > 1'000'000) throw std::runtime_error("checkpoint: implausible user count");
    for (std::uint64_t k = 0; k < n_users; ++k) {
      Position p;
      p.x = real();
      p.y = real();
      p.z = real();
      task.users.push_back(p);
    }
    s.tasks.push_back(std::move(task));
    s.buffers.emplace_back(buffer_capacity);
  }
  ckpt::expect(in, "query_loss");
  const std::uint64_t n_loss = u64(ckpt::next_token(in));
  for (std::uint64_t i = 0; i < n_loss; ++i) s.query_loss.push_back(real());
  ckpt::expect(in, "end-meta");
  return s;
}

void save_meta_checkpoint(const std::filesystem::path& path, const MetaState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  write_meta_state(out, state);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

MetaState load_meta_checkpoint(const std::filesystem::path& path, std::size_t buffer_capacity) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return read_meta_state(in, buffer_capacity);
}

}  // namespace uavvlc
