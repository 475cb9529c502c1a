#include "uavvlc/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uavvlc/baselines.hpp"
#include "uavvlc/training.hpp"

namespace uavvlc {

namespace {

constexpr std::uint64_t kEvalTaskStream = 11;
constexpr std::uint64_t kMetaStream = 12;
constexpr std::uint64_t kSchemeStream = 20;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("bad number '" + s + "'");
  }
  if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

const std::string kHashPrefix = "# config_hash=";

}  // namespace

std::string csv_header() {
  return "scheme,sweep_value,seed,mean_p_tot,mean_sum_rate,mean_ee,feasibility_fraction";
}

std::string format_row(const ResultRow& r) {
  return std::string(to_string(r.scheme)) + ',' + num(r.sweep_value) + ',' + std::to_string(r.seed) + ',' +
         num(r.mean_p_tot) + ',' + num(r.mean_sum_rate) + ',' + num(r.mean_ee) + ',' + num(r.feasibility_fraction);
}

ResultRow parse_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 7) throw std::runtime_error("result row needs 7 fields: '" + line + "'");
  ResultRow r;
  r.scheme = parse_scheme(f[0]);
  r.sweep_value = parse_double(f[1]);
  try {
    std::size_t pos = 0;
    r.seed = std::stoull(f[2], &pos);
    if (pos != f[2].size()) throw std::invalid_argument(f[2]);
  } catch (const std::exception&) {
    throw std::runtime_error("bad seed '" + f[2] + "'");
  }
  r.mean_p_tot = parse_double(f[3]);
  r.mean_sum_rate = parse_double(f[4]);
  r.mean_ee = parse_double(f[5]);
  r.feasibility_fraction = parse_double(f[6]);
  return r;
}

std::string row_key(const ResultRow& r) {
  return std::string(to_string(r.scheme)) + ',' + num(r.sweep_value) + ',' + std::to_string(r.seed);
}

TaskSampler task_sampler(const SystemConfig& cfg) {
  return [model = cfg.model, region = cfg.tasks, margin = cfg.env.init_margin](Rng& rng) {
    return sample_task(model, rng, region, margin);
  };
}

std::vector<Task> evaluation_tasks(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kEvalTaskStream));
  const TaskSampler sampler = task_sampler(cfg);
  std::vector<Task> tasks;
  for (int i = 0; i < cfg.experiment.eval_tasks; ++i) tasks.push_back(sampler(rng));
  return tasks;
}

MetaState train_meta(const SystemConfig& cfg, std::uint64_t seed, const MetaProgress& progress) {
  Environment env(cfg.model, cfg.env);
  return meta_train(env, task_sampler(cfg), cfg.sac, cfg.meta, derive_seed(seed, kMetaStream), progress);
}

std::vector<EpisodeTrace> evaluate_scheme(const SystemConfig& cfg, Scheme scheme, const Task& task,
                                          std::uint64_t stream_seed, const MetaState* meta) {
  Environment env(cfg.model, cfg.env);
  Rng rng(stream_seed);
  std::optional<SacAgent> agent;
  if (scheme == Scheme::sac) {
    agent.emplace(env.observation_dim(), env.action_dim(), cfg.sac, rng);
    ReplayBuffer buffer(cfg.adapt.buffer_capacity);
    train_sac(*agent, env, task, cfg.adapt, buffer, rng);
  } else if (scheme == Scheme::meta_sac) {
    if (meta == nullptr) throw std::invalid_argument("evaluate_scheme: meta-sac needs a meta-trained state");
    agent.emplace(meta_adapt(meta->global, env, task, cfg.meta, cfg.adapt, rng));
  }

  std::vector<EpisodeTrace> traces;
  for (int e = 0; e < cfg.experiment.eval_episodes; ++e) {
    Task episode = task;
    episode.seed = derive_seed(task.seed, static_cast<std::uint64_t>(e));
    switch (scheme) {
      case Scheme::greedy: traces.push_back(baseline_greedy(env, episode, cfg.greedy)); break;
      case Scheme::random: traces.push_back(baseline_random(env, episode, rng)); break;
      case Scheme::sac:
      case Scheme::meta_sac: traces.push_back(run_policy(*agent, env, episode)); break;
    }
  }
  return traces;
}

ResultRow run_point(const SystemConfig& base, Scheme scheme, double sweep_value, std::uint64_t seed) {
  const SystemConfig cfg = with_sweep_value(base, base.experiment.variable, sweep_value);
  std::optional<MetaState> meta;
  if (scheme == Scheme::meta_sac) meta.emplace(train_meta(cfg, seed));

  const std::vector<Task> tasks = evaluation_tasks(cfg, seed);
  const std::uint64_t scheme_seed = derive_seed(seed, kSchemeStream + static_cast<std::uint64_t>(scheme));
  ResultRow row{scheme, sweep_value, seed, 0.0, 0.0, 0.0, 0.0};
  int count = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const EpisodeTrace& t : evaluate_scheme(cfg, scheme, tasks[i], derive_seed(scheme_seed, i),
                                                 meta ? &*meta : nullptr)) {
      row.mean_p_tot += t.mean_total_power();
      row.mean_sum_rate += t.mean_sum_rate();
      row.mean_ee += t.mean_energy_efficiency();
      row.feasibility_fraction += t.feasible_fraction();
      ++count;
    }
  }
  row.mean_p_tot /= count;
  row.mean_sum_rate /= count;
  row.mean_ee /= count;
  row.feasibility_fraction /= count;
  return row;
}

ResultFile read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open results file");
  ResultFile file;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind(kHashPrefix, 0) == 0) {
      file.config_hash = line.substr(kHashPrefix.size());
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {
      if (line != csv_header()) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": unexpected header");
      header_seen = true;
      continue;
    }
    try {
      file.rows.push_back(parse_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return file;
}

RunSummary run_experiment(const SystemConfig& cfg, const std::filesystem::path& out, int threads,
                          const std::function<void(const ResultRow&)>& on_row) {
  cfg.experiment.validate();
  if (threads < 1) throw std::invalid_argument("run_experiment: threads must be >= 1");
  const std::string hash = config_hash_hex(cfg);

  std::set<std::string> done;
  const bool exists = std::filesystem::exists(out) && std::filesystem::file_size(out) > 0;
  if (exists) {
    const ResultFile prev = read_results(out);
    if (prev.config_hash != hash) {
      throw std::runtime_error(out.string() + ": written under config hash " + prev.config_hash + ", current is " +
                               hash);
    }
    for (const ResultRow& r : prev.rows) done.insert(row_key(r));
  }

  std::ofstream file(out, std::ios::app);
  if (!file) throw std::runtime_error(out.string() + ": cannot open for writing");
  if (!exists) file << kHashPrefix << hash << '\n' << csv_header() << '\n' << std::flush;

  struct Job {
    Scheme scheme;
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  RunSummary summary;
  for (double value : cfg.experiment.values) {
    for (int s = 0; s < cfg.experiment.seeds; ++s) {
      for (Scheme scheme : cfg.experiment.schemes) {
        const Job job{scheme, value, cfg.experiment.seed_base + static_cast<std::uint64_t>(s)};
        if (done.contains(row_key({job.scheme, job.value, job.seed}))) {
          ++summary.skipped;
        } else {
          jobs.push_back(job);
        }
      }
    }
  }

  std::mutex write_mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const ResultRow row = run_point(cfg, jobs[i].scheme, jobs[i].value, jobs[i].seed);
        std::lock_guard lock(write_mu);
        if (failure) return;
        file << format_row(row) << '\n' << std::flush;
        if (!file) throw std::runtime_error(out.string() + ": write failed");
        ++summary.written;
        if (on_row) on_row(row);
      } catch (...) {
        std::lock_guard lock(write_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
        return;
      }
    }
  };
  const int n_workers = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summary;
}

}  // namespace uavvlc
