#include "uavvlc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace uavvlc {

namespace {

template <class E>
struct EnumName {
  E value;
  std::string_view name;
};

constexpr EnumName<Scheme> kSchemes[] = {
    {Scheme::meta_sac, "meta-sac"}, {Scheme::sac, "sac"}, {Scheme::greedy, "greedy"}, {Scheme::random, "random"}};
constexpr EnumName<SweepVariable> kSweeps[] = {{SweepVariable::users, "users"},
                                               {SweepVariable::p_max, "p_max"},
                                               {SweepVariable::r_min, "r_min"},
                                               {SweepVariable::n_leds, "n_leds"}};
constexpr EnumName<RewardMode> kRewardModes[] = {{RewardMode::amended, "amended"},
                                                 {RewardMode::zero_penalty, "zero"}};
constexpr EnumName<PenaltyMode> kPenaltyModes[] = {{PenaltyMode::constant, "constant"}, {PenaltyMode::power, "power"}};
constexpr EnumName<VelocityMode> kVelocityModes[] = {{VelocityMode::clamped, "clamped"},
                                                     {VelocityMode::report, "report"}};
constexpr EnumName<ObservationMode> kObservationModes[] = {{ObservationMode::augmented, "augmented"},
                                                           {ObservationMode::channels_only, "channels_only"}};

template <class E, std::size_t N>
std::string_view name_of(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

template <class E, std::size_t N>
bool lookup(const EnumName<E> (&table)[N], std::string_view name, E& out) {
  for (const auto& e : table) {
    if (e.name == name) {
      out = e.value;
      return true;
    }
  }
  return false;
}

template <class E, std::size_t N>
std::string choices(const EnumName<E> (&table)[N]) {
  std::string s;
  for (const auto& e : table) {
    if (!s.empty()) s += ", ";
    s += e.name;
  }
  return s;
}

constexpr double kDeg = std::numbers::pi / 180.0;

std::string real_text(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  std::string s = buf;
  if (s == "inf") return ".inf";
  if (s == "-inf") return "-.inf";
  if (s == "nan" || s == "-nan") return ".nan";
  return s;
}

// One traversal drives both parsing and dumping so the two cannot drift apart.
template <class V>
void visit(V& v, SystemConfig& c) {
  SystemModel& m = c.model;
  v.integer("users", m.n_users);
  v.section("optics", [&] {
    v.angle("half_power_semiangle_deg", m.optics.half_power_semiangle);
    v.angle("fov_semiangle_deg", m.optics.fov_semiangle);
    v.real("pd_area_m2", m.optics.pd_area);
    v.real("refractive_index", m.optics.refractive_index);
  });
  v.section("receiver", [&] {
    v.real("noise_var", m.receiver.noise_var);
    v.real("csi_radius", m.receiver.csi_radius);
    v.real("user_height", m.receiver.user_height);
  });
  v.section("dimming", [&] {
    v.real("eta", m.dimming.eta);
    v.real("i_low", m.dimming.i_low);
    v.real("i_high", m.dimming.i_high);
    v.integer("n_leds", m.dimming.n_leds);
  });
  v.section("flight", [&] {
    v.real("slot_duration", m.flight.slot_duration);
    v.real("v_max", m.flight.v_max);
    v.real("a_max", m.flight.a_max);
    v.vec3("q_min", m.flight.q_min);
    v.vec3("q_max", m.flight.q_max);
    v.vec3("q_init", m.flight.q_init);
    v.integer("n_slots", m.flight.n_slots);
    v.real("return_tolerance", m.flight.return_tolerance);
  });
  v.section("rotor", [&] {
    v.real("profile_drag", m.rotor.profile_drag);
    v.real("air_density", m.rotor.air_density);
    v.real("rotor_solidity", m.rotor.rotor_solidity);
    v.real("disk_area", m.rotor.disk_area);
    v.real("blade_angular_velocity", m.rotor.blade_angular_velocity);
    v.real("rotor_radius", m.rotor.rotor_radius);
    v.real("induced_correction", m.rotor.induced_correction);
    v.real("weight", m.rotor.weight);
    v.real("hover_induced_velocity", m.rotor.hover_induced_velocity);
    v.real("fuselage_drag_ratio", m.rotor.fuselage_drag_ratio);
  });
  v.section("power", [&] {
    v.real("amp_efficiency", m.power.amp_efficiency);
    v.real("conversion_factor", m.power.conversion_factor);
    v.real("circuit_power", m.power.circuit_power);
  });
  v.section("qos", [&] {
    v.real("r_min", m.qos.r_min);
    v.real("p_max", m.qos.p_max);
  });
  v.section("env", [&] {
    v.enumeration("reward_mode", c.env.reward_mode, kRewardModes);
    v.enumeration("penalty_mode", c.env.penalty_mode, kPenaltyModes);
    v.optional_real("penalty", c.env.penalty);
    v.real("rate_shortfall_weight", c.env.rate_shortfall_weight);
    v.real("flight_violation_weight", c.env.flight_violation_weight);
    v.enumeration("velocity_mode", c.env.velocity_mode, kVelocityModes);
    v.enumeration("observation_mode", c.env.observation_mode, kObservationModes);
    v.real("channel_reference_distance", c.env.channel_reference_distance);
    v.real("init_margin", c.env.init_margin);
  });
  v.section("tasks", [&] {
    v.real("x_lo", c.tasks.x_lo);
    v.real("x_hi", c.tasks.x_hi);
    v.real("y_lo", c.tasks.y_lo);
    v.real("y_hi", c.tasks.y_hi);
    v.real("cluster_radius", c.tasks.cluster_radius);
  });
  v.section("sac", [&] {
    v.real("gamma", c.sac.gamma);
    v.real("entropy_weight", c.sac.entropy_weight);
    v.real("target_smoothing", c.sac.target_smoothing);
    v.integer("batch_size", c.sac.batch_size);
    v.real("lr_actor", c.sac.lr_actor);
    v.real("lr_critic1", c.sac.lr_critic1);
    v.real("lr_critic2", c.sac.lr_critic2);
    v.real("adam_beta1", c.sac.adam_beta1);
    v.real("adam_beta2", c.sac.adam_beta2);
    v.real("adam_epsilon", c.sac.adam_epsilon);
    v.ints("hidden", c.sac.hidden);
    v.real("log_std_min", c.sac.log_std_min);
    v.real("log_std_max", c.sac.log_std_max);
    v.boolean("target_actor_bootstrap", c.sac.target_actor_bootstrap);
    v.real("reward_scale", c.sac.reward_scale);
    v.real("reward_shift", c.sac.reward_shift);
  });
  v.section("meta", [&] {
    v.integer("n_tasks", c.meta.n_tasks);
    v.integer("iterations", c.meta.iterations);
    v.integer("inner_steps", c.meta.inner_steps);
    v.real("inner_lr_actor", c.meta.inner_lr_actor);
    v.real("inner_lr_critic", c.meta.inner_lr_critic);
    v.real("support_fraction", c.meta.support_fraction);
    v.integer("warmup_episodes", c.meta.warmup_episodes);
    v.integer("episodes_per_iteration", c.meta.episodes_per_iteration);
    v.size("task_buffer_capacity", c.meta.task_buffer_capacity);
    v.real("adapt_lr_actor", c.meta.adapt_lr_actor);
    v.real("adapt_lr_critic1", c.meta.adapt_lr_critic1);
    v.real("adapt_lr_critic2", c.meta.adapt_lr_critic2);
  });
  for (auto [name, t] : {std::pair<const char*, TrainConfig*>{"train", &c.train}, {"adapt", &c.adapt}}) {
    v.section(name, [&] {
      v.integer("episodes", t->episodes);
      v.integer("warmup_steps", t->warmup_steps);
      v.integer("updates_per_step", t->updates_per_step);
      v.integer("min_buffer", t->min_buffer);
      v.size("buffer_capacity", t->buffer_capacity);
    });
  }
  v.section("greedy", [&] {
    v.real("sinr_margin", c.greedy.sinr_margin);
    v.real("order_margin", c.greedy.order_margin);
    v.real("altitude_floor", c.greedy.altitude_floor);
    v.real("fov_fill", c.greedy.fov_fill);
    v.integer("max_iterations", c.greedy.max_iterations);
  });
  v.section("experiment", [&] {
    v.text("scenario", c.experiment.scenario);
    v.enumeration("sweep", c.experiment.variable, kSweeps);
    v.reals("values", c.experiment.values);
    v.integer("seeds", c.experiment.seeds);
    v.u64("seed_base", c.experiment.seed_base);
    v.schemes("schemes", c.experiment.schemes);
    v.text("output", c.experiment.output);
    v.integer("eval_tasks", c.experiment.eval_tasks);
    v.integer("eval_episodes", c.experiment.eval_episodes);
  });
}

class Reader {
 public:
  Reader(const YAML::Node& root, std::string source) : source_(std::move(source)) { stack_.push_back({root, {}}); }

  void section(const char* key, const std::function<void()>& body) {
    const YAML::Node n = get(key);
    if (n && !n.IsNull() && !n.IsMap()) fail(n, std::string(key) + " must be a mapping");
    stack_.push_back({n && n.IsMap() ? n : YAML::Node(), {}});
    body();
    finish();
    stack_.pop_back();
  }

  void real(const char* key, double& out) {
    if (const YAML::Node n = get(key)) out = as<double>(n, key);
  }
  void angle(const char* key, double& rad) {
    if (const YAML::Node n = get(key)) rad = as<double>(n, key) * kDeg;
  }
  void integer(const char* key, int& out) {
    if (const YAML::Node n = get(key)) out = as<int>(n, key);
  }
  void size(const char* key, std::size_t& out) {
    if (const YAML::Node n = get(key)) {
      const long long v = as<long long>(n, key);
      if (v < 0) fail(n, std::string(key) + " must be >= 0");
      out = static_cast<std::size_t>(v);
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    if (const YAML::Node n = get(key)) out = as<std::uint64_t>(n, key);
  }
  void boolean(const char* key, bool& out) {
    if (const YAML::Node n = get(key)) out = as<bool>(n, key);
  }
  void text(const char* key, std::string& out) {
    if (const YAML::Node n = get(key)) out = as<std::string>(n, key);
  }
  void optional_real(const char* key, std::optional<double>& out) {
    if (const YAML::Node n = get(key)) {
      if (n.IsNull()) out.reset();
      else out = as<double>(n, key);
    }
  }
  void vec3(const char* key, Position& out) {
    if (const YAML::Node n = get(key)) {
      if (!n.IsSequence() || n.size() != 3) fail(n, std::string(key) + " must be a list [x, y, z]");
      out = {as<double>(n[0], key), as<double>(n[1], key), as<double>(n[2], key)};
    }
  }
  void ints(const char* key, std::vector<int>& out) { list(key, out); }
  void reals(const char* key, std::vector<double>& out) { list(key, out); }
  void schemes(const char* key, std::vector<Scheme>& out) {
    if (const YAML::Node n = get(key)) {
      if (!n.IsSequence()) fail(n, std::string(key) + " must be a list");
      out.clear();
      for (const auto& item : n) {
        Scheme s{};
        if (!lookup(kSchemes, as<std::string>(item, key), s)) {
          fail(item, "unknown scheme '" + item.as<std::string>() + "' (expected one of: " + choices(kSchemes) + ")");
        }
        out.push_back(s);
      }
    }
  }
  template <class E, std::size_t N>
  void enumeration(const char* key, E& out, const EnumName<E> (&table)[N]) {
    if (const YAML::Node n = get(key)) {
      const auto name = as<std::string>(n, key);
      if (!lookup(table, name, out)) {
        fail(n, std::string(key) + ": unknown value '" + name + "' (expected one of: " + choices(table) + ")");
      }
    }
  }

  void finish() {
    const Frame& f = stack_.back();
    if (!f.node || !f.node.IsMap()) return;
    for (const auto& kv : f.node) {
      const auto k = kv.first.as<std::string>();
      if (!f.seen.contains(k)) fail(kv.first, "unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(n.Mark().line + 1) + ": " + msg);
  }

 private:
  struct Frame {
    YAML::Node node;
    std::set<std::string> seen;
  };

  YAML::Node get(const char* key) {
    Frame& f = stack_.back();
    f.seen.insert(key);
    if (!f.node || !f.node.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node n = f.node[key];
    return n ? n : YAML::Node(YAML::NodeType::Undefined);
  }

  template <class T>
  T as(const YAML::Node& n, const char* key) const {
    try {
      if (!n.IsScalar()) fail(n, std::string(key) + " must be a scalar");
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, std::string(key) + ": cannot convert '" + n.Scalar() + "'");
    }
  }

  template <class T>
  void list(const char* key, std::vector<T>& out) {
    if (const YAML::Node n = get(key)) {
      if (!n.IsSequence()) fail(n, std::string(key) + " must be a list");
      out.clear();
      for (const auto& item : n) out.push_back(as<T>(item, key));
    }
  }

  std::string source_;
  std::vector<Frame> stack_;
};

class Writer {
 public:
  std::string str() const { return out_.str(); }

  void section(const char* key, const std::function<void()>& body) {
    line(key) << ":\n";
    ++depth_;
    body();
    --depth_;
  }
  void real(const char* key, double v) { line(key) << ": " << real_text(v) << '\n'; }
  void angle(const char* key, double rad) { line(key) << ": " << real_text(rad / kDeg, 15) << '\n'; }
  void integer(const char* key, int v) { line(key) << ": " << v << '\n'; }
  void size(const char* key, std::size_t v) { line(key) << ": " << v << '\n'; }
  void u64(const char* key, std::uint64_t v) { line(key) << ": " << v << '\n'; }
  void boolean(const char* key, bool v) { line(key) << ": " << (v ? "true" : "false") << '\n'; }
  void text(const char* key, const std::string& v) {
    YAML::Emitter e;
    e << YAML::DoubleQuoted << v;
    line(key) << ": " << e.c_str() << '\n';
  }
  void optional_real(const char* key, const std::optional<double>& v) {
    line(key) << ": " << (v ? real_text(*v) : std::string("null")) << '\n';
  }
  void vec3(const char* key, const Position& p) {
    line(key) << ": [" << real_text(p.x) << ", " << real_text(p.y) << ", " << real_text(p.z) << "]\n";
  }
  void ints(const char* key, const std::vector<int>& v) {
    seq(key, v, [](int x) { return std::to_string(x); });
  }
  void reals(const char* key, const std::vector<double>& v) {
    seq(key, v, [](double x) { return real_text(x); });
  }
  void schemes(const char* key, const std::vector<Scheme>& v) {
    seq(key, v, [](Scheme s) { return std::string(to_string(s)); });
  }
  template <class E, std::size_t N>
  void enumeration(const char* key, E v, const EnumName<E> (&table)[N]) {
    line(key) << ": " << name_of(table, v) << '\n';
  }

 private:
  std::ostream& line(const char* key) {
    out_ << std::string(static_cast<std::size_t>(2 * depth_), ' ') << key;
    return out_;
  }
  template <class T, class F>
  void seq(const char* key, const std::vector<T>& v, F fmt) {
    line(key) << ": [";
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << fmt(v[i]);
    out_ << "]\n";
  }

  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::string_view to_string(Scheme s) { return name_of(kSchemes, s); }
std::string_view to_string(SweepVariable v) { return name_of(kSweeps, v); }

Scheme parse_scheme(std::string_view name) {
  Scheme s{};
  if (!lookup(kSchemes, name, s)) {
    throw ConfigError("unknown scheme '" + std::string(name) + "' (expected one of: " + choices(kSchemes) + ")");
  }
  return s;
}

SweepVariable parse_sweep_variable(std::string_view name) {
  SweepVariable v{};
  if (!lookup(kSweeps, name, v)) {
    throw ConfigError("unknown sweep variable '" + std::string(name) + "' (expected one of: " + choices(kSweeps) +
                      ")");
  }
  return v;
}

void ExperimentSpec::validate() const {
  if (values.empty()) throw std::range_error("experiment: sweep values must be non-empty");
  if (seeds < 1) throw std::range_error("experiment: seeds must be >= 1");
  if (schemes.empty()) throw std::range_error("experiment: scheme list must be non-empty");
  if (eval_tasks < 1) throw std::range_error("experiment: eval_tasks must be >= 1");
  if (eval_episodes < 1) throw std::range_error("experiment: eval_episodes must be >= 1");
  if (output.empty()) throw std::range_error("experiment: output path must be non-empty");
}

void SystemConfig::validate() const {
  model.validate();
  tasks.validate();
  sac.validate();
  meta.validate();
  train.validate();
  adapt.validate();
  greedy.validate();
  experiment.validate();
  if (!(env.channel_reference_distance > 0.0)) throw std::range_error("channel reference distance must be positive");
  if (!(env.init_margin >= 0.0)) throw std::range_error("init margin must be >= 0");
  if (!(env.rate_shortfall_weight >= 0.0 && env.flight_violation_weight >= 0.0)) {
    throw std::range_error("penalty weights must be >= 0");
  }
  if (env.penalty && !std::isfinite(*env.penalty)) throw std::range_error("penalty must be finite");
}

SystemConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root && !root.IsNull() && !root.IsMap()) {
    throw ConfigError(source + ":" + std::to_string(root.Mark().line + 1) + ": top level must be a mapping");
  }
  SystemConfig cfg;
  Reader r(root, source);
  visit(r, cfg);
  r.finish();
  try {
    cfg.validate();
  } catch (const std::range_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const SystemConfig& cfg) {
  Writer w;
  SystemConfig copy = cfg;
  visit(w, copy);
  return w.str();
}

std::uint64_t config_hash(const SystemConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const SystemConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

SystemConfig with_sweep_value(const SystemConfig& cfg, SweepVariable variable, double value) {
  SystemConfig out = cfg;
  const auto as_count = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e6) {
      throw std::range_error(std::string(what) + " sweep values must be positive integers");
    }
    return static_cast<int>(value);
  };
  switch (variable) {
    case SweepVariable::users: out.model.n_users = as_count("user count"); break;
    case SweepVariable::n_leds: out.model.dimming.n_leds = as_count("LED count"); break;
    case SweepVariable::p_max: out.model.qos.p_max = value; break;
    case SweepVariable::r_min: out.model.qos.r_min = value; break;
  }
  out.model.validate();
  return out;
}

std::vector<std::string> config_notes(const SystemConfig& cfg) {
  std::vector<std::string> notes;
  notes.push_back("the reference parameter list gives V_max as both 20 m/s and 10 m/s; using v_max = " +
                  real_text(cfg.model.flight.v_max, 6) + " m/s (default 10)");
  double floor_power = hover_power(cfg.model.rotor).total;
  for (int i = 1; i <= 1000; ++i) {
    floor_power = std::min(floor_power, propulsion_terms(cfg.model.flight.v_max * i / 1000.0, cfg.model.rotor).total);
  }
  if (cfg.model.qos.p_max < floor_power) {
    notes.push_back("p_max = " + real_text(cfg.model.qos.p_max, 6) + " W is below the minimum propulsion power (" +
                    real_text(floor_power, 6) + " W); no slot can satisfy the power budget");
  }
  return notes;
}

}  // namespace uavvlc
