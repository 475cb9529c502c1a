#include "uavvlc/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace uavvlc {
namespace ckpt {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_real(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
    throw std::runtime_error("checkpoint: bad real '" + token + "'");
  }
  return v;
}

std::string next_token(std::istream& in) {
  std::string t;
  if (!(in >> t)) throw std::runtime_error("checkpoint: unexpected end of input");
  return t;
}

void expect(std::istream& in, const std::string& token) {
  const std::string t = next_token(in);
  if (t != token) throw std::runtime_error("checkpoint: expected '" + token + "', found '" + t + "'");
}

}  // namespace ckpt

namespace {

long long parse_int(const std::string& token) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint: bad integer '" + token + "'");
  }
  if (pos != token.size()) throw std::runtime_error("checkpoint: bad integer '" + token + "'");
  return v;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  out << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ckpt::hex(v(i)) << '\n';
}

Eigen::VectorXd read_vector(std::istream& in) {
  const long long n = parse_int(ckpt::next_token(in));
  if (n < 0) throw std::runtime_error("checkpoint: negative vector length");
  Eigen::VectorXd v(n);
  for (long long i = 0; i < n; ++i) v(i) = ckpt::parse_real(ckpt::next_token(in));
  return v;
}

void write_network(std::ostream& out, const std::string& name, const Mlp& net) {
  out << "network " << name << " " << net.sizes().size();
  for (int s : net.sizes()) out << ' ' << s;
  out << '\n';
  write_vector(out, net.parameters());
}

Mlp read_network(std::istream& in, const std::string& name) {
  ckpt::expect(in, "network");
  ckpt::expect(in, name);
  const long long layers = parse_int(ckpt::next_token(in));
  if (layers < 2 || layers > 64) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<int> sizes;
  for (long long i = 0; i < layers; ++i) sizes.push_back(static_cast<int>(parse_int(ckpt::next_token(in))));
  Mlp net(sizes);
  Eigen::VectorXd p = read_vector(in);
  if (p.size() != net.parameter_count()) throw std::runtime_error("checkpoint: parameter count mismatch");
  net.parameters() = std::move(p);
  return net;
}

void write_adam(std::ostream& out, const std::string& name, const AdamState& s) {
  out << "adam " << name << ' ' << s.t << '\n';
  write_vector(out, s.m);
  write_vector(out, s.v);
}

AdamState read_adam(std::istream& in, const std::string& name) {
  ckpt::expect(in, "adam");
  ckpt::expect(in, name);
  AdamState s;
  s.t = parse_int(ckpt::next_token(in));
  s.m = read_vector(in);
  s.v = read_vector(in);
  return s;
}

}  // namespace

void write_agent(std::ostream& out, const SacAgent& agent) {
  const SacHyper& h = agent.hyper();
  out << "uavvlc-sac-checkpoint " << kCheckpointVersion << '\n';
  out << "gamma " << ckpt::hex(h.gamma) << '\n';
  out << "entropy_weight " << ckpt::hex(h.entropy_weight) << '\n';
  out << "target_smoothing " << ckpt::hex(h.target_smoothing) << '\n';
  out << "batch_size " << h.batch_size << '\n';
  out << "lr_actor " << ckpt::hex(h.lr_actor) << '\n';
  out << "lr_critic1 " << ckpt::hex(h.lr_critic1) << '\n';
  out << "lr_critic2 " << ckpt::hex(h.lr_critic2) << '\n';
  out << "adam_beta1 " << ckpt::hex(h.adam_beta1) << '\n';
  out << "adam_beta2 " << ckpt::hex(h.adam_beta2) << '\n';
  out << "adam_epsilon " << ckpt::hex(h.adam_epsilon) << '\n';
  out << "log_std_min " << ckpt::hex(h.log_std_min) << '\n';
  out << "log_std_max " << ckpt::hex(h.log_std_max) << '\n';
  out << "target_actor_bootstrap " << (h.target_actor_bootstrap ? 1 : 0) << '\n';
  out << "reward_scale " << ckpt::hex(h.reward_scale) << '\n';
  out << "reward_shift " << ckpt::hex(h.reward_shift) << '\n';
  out << "hidden " << h.hidden.size();
  for (int s : h.hidden) out << ' ' << s;
  out << '\n';
  out << "updates " << agent.update_count() << '\n';
  const SacNetworks& n = agent.networks();
  write_network(out, "actor", n.actor);
  write_network(out, "critic1", n.critic1);
  write_network(out, "critic2", n.critic2);
  write_network(out, "target_actor", n.target_actor);
  write_network(out, "target_critic1", n.target_critic1);
  write_network(out, "target_critic2", n.target_critic2);
  write_adam(out, "actor", agent.optimizers().actor);
  write_adam(out, "critic1", agent.optimizers().critic1);
  write_adam(out, "critic2", agent.optimizers().critic2);
  out << "end-sac\n";
}

SacAgent read_agent(std::istream& in) {
  ckpt::expect(in, "uavvlc-sac-checkpoint");
  const long long version = parse_int(ckpt::next_token(in));
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto real = [&](const char* key) {
    ckpt::expect(in, key);
    return ckpt::parse_real(ckpt::next_token(in));
  };
  const auto integer = [&](const char* key) {
    ckpt::expect(in, key);
    return parse_int(ckpt::next_token(in));
  };
  SacHyper h;
  h.gamma = real("gamma");
  h.entropy_weight = real("entropy_weight");
  h.target_smoothing = real("target_smoothing");
  h.batch_size = static_cast<int>(integer("batch_size"));
  h.lr_actor = real("lr_actor");
  h.lr_critic1 = real("lr_critic1");
  h.lr_critic2 = real("lr_critic2");
  h.adam_beta1 = real("adam_beta1");
  h.adam_beta2 = real("adam_beta2");
  h.adam_epsilon = real("adam_epsilon");
  h.log_std_min = real("log_std_min");
  h.log_std_max = real("log_std_max");
  h.target_actor_bootstrap = integer("target_actor_bootstrap") != 0;
  h.reward_scale = real("reward_scale");
  h.reward_shift = real("reward_shift");
  const long long n_hidden = integer("hidden");
  if (n_hidden < 0 || n_hidden > 64) throw std::runtime_error("checkpoint: bad hidden layer count");
  h.hidden.clear();
  for (long long i = 0; i < n_hidden; ++i) h.hidden.push_back(static_cast<int>(parse_int(ckpt::next_token(in))));
  const long long updates = integer("updates");

  SacNetworks n;
  n.actor = read_network(in, "actor");
  n.critic1 = read_network(in, "critic1");
  n.critic2 = read_network(in, "critic2");
  n.target_actor = read_network(in, "target_actor");
  n.target_critic1 = read_network(in, "target_critic1");
  n.target_critic2 = read_network(in, "target_critic2");
  if (!n.target_actor.same_shape(n.actor) || !n.target_critic1.same_shape(n.critic1) ||
      !n.target_critic2.same_shape(n.critic2) || !n.critic1.same_shape(n.critic2)) {
    throw std::runtime_error("checkpoint: inconsistent network shapes");
  }
  SacAgent agent(std::move(n), h);
  agent.optimizers().actor = read_adam(in, "actor");
  agent.optimizers().critic1 = read_adam(in, "critic1");
  agent.optimizers().critic2 = read_adam(in, "critic2");
  const auto check = [](const AdamState& s, const Mlp& net) {
    if (s.m.size() != net.parameter_count() || s.v.size() != net.parameter_count()) {
      throw std::runtime_error("checkpoint: optimizer state size mismatch");
    }
  };
  check(agent.optimizers().actor, agent.networks().actor);
  check(agent.optimizers().critic1, agent.networks().critic1);
  check(agent.optimizers().critic2, agent.networks().critic2);
  agent.set_update_count(updates);
  ckpt::expect(in, "end-sac");
  return agent;
}

void save_checkpoint(const std::filesystem::path& path, const SacAgent& agent) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  write_agent(out, agent);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

SacAgent load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return read_agent(in);
}

}  // namespace uavvlc
