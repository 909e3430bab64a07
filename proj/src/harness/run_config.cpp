#include "samarl/harness/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "samarl/harness/metrics.hpp"

namespace samarl::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename N>
N parse_number(const std::string& key, const std::string& text) {
  N value{};
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, value);
  if (r.ec != std::errc() || r.ptr != end) {
    throw RunConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw RunConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename N, typename Ref>
Field number(std::string key, Ref ref) {
  Field f;
  f.key = key;
  f.set = [key, ref](RunConfig& c, const std::string& v) { ref(c) = parse_number<N>(key, v); };
  f.get = [ref](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<N>) {
      return format_double(ref(c));
    } else {
      return std::to_string(ref(c));
    }
  };
  return f;
}

template <typename Ref>
Field flag(std::string key, Ref ref) {
  Field f;
  f.key = key;
  f.set = [key, ref](RunConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); };
  f.get = [ref](const RunConfig& c) { return std::string(ref(c) ? "true" : "false"); };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back({"scenario",
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.scenario = env::parse_scenario(v);
                   } catch (const env::ConfigError& e) {
                     throw RunConfigError(std::string("config key 'scenario': ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(env::scenario_name(c.scenario)); }});
    t.push_back({"algo",
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.algo = algo::parse_algo(v);
                   } catch (const algo::ConfigError& e) {
                     throw RunConfigError(std::string("config key 'algo': ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(algo::algo_name(c.algo)); }});
    t.push_back(number<std::size_t>("agents", [](auto& c) -> auto& { return c.agents; }));
    t.push_back(number<std::uint64_t>("episodes", [](auto& c) -> auto& { return c.episodes; }));
    t.push_back(number<std::uint64_t>("seed", [](auto& c) -> auto& { return c.seed; }));
    t.push_back({"out", [](RunConfig& c, const std::string& v) { c.out = v; },
                 [](const RunConfig& c) { return c.out.string(); }});
    t.push_back({"prey", [](RunConfig& c, const std::string& v) { c.prey = v; },
                 [](const RunConfig& c) { return c.prey; }});
    t.push_back(number<std::uint64_t>("eval_interval", [](auto& c) -> auto& { return c.eval_interval; }));
    t.push_back(number<std::uint64_t>("eval_episodes", [](auto& c) -> auto& { return c.eval_episodes; }));
    t.push_back(
        number<std::uint64_t>("checkpoint_interval", [](auto& c) -> auto& { return c.checkpoint_interval; }));
    t.push_back(number<std::uint64_t>("flush_interval", [](auto& c) -> auto& { return c.flush_interval; }));
    t.push_back(number<std::size_t>("smoothing_window", [](auto& c) -> auto& { return c.smoothing_window; }));

    t.push_back(number<double>("gamma", [](auto& c) -> auto& { return c.train.gamma; }));
    t.push_back(number<double>("tau", [](auto& c) -> auto& { return c.train.tau; }));
    t.push_back(number<std::size_t>("batch_size", [](auto& c) -> auto& { return c.train.batch_size; }));
    t.push_back(
        number<std::size_t>("buffer_capacity", [](auto& c) -> auto& { return c.train.buffer_capacity; }));
    t.push_back(number<std::uint64_t>("train_start_episodes",
                                      [](auto& c) -> auto& { return c.train.train_start_episodes; }));
    t.push_back(
        number<std::uint64_t>("train_frequency", [](auto& c) -> auto& { return c.train.train_frequency; }));
    t.push_back(
        number<std::uint64_t>("delay_frequency", [](auto& c) -> auto& { return c.train.delay_frequency; }));
    t.push_back(number<double>("action_noise", [](auto& c) -> auto& { return c.train.action_noise; }));
    t.push_back(number<double>("critic_noise", [](auto& c) -> auto& { return c.train.critic_noise; }));
    t.push_back(number<double>("actor_lr", [](auto& c) -> auto& { return c.train.actor_lr; }));
    t.push_back(number<double>("critic_lr", [](auto& c) -> auto& { return c.train.critic_lr; }));
    t.push_back(number<double>("grad_clip", [](auto& c) -> auto& { return c.train.grad_clip; }));
    t.push_back(number<double>("action_low", [](auto& c) -> auto& { return c.train.action_low; }));
    t.push_back(number<double>("action_high", [](auto& c) -> auto& { return c.train.action_high; }));
    t.push_back(number<std::size_t>("mlp_hidden", [](auto& c) -> auto& { return c.train.mlp.hidden; }));
    t.push_back(number<std::size_t>("mlp_layers", [](auto& c) -> auto& { return c.train.mlp.layers; }));
    t.push_back(
        number<std::size_t>("attn_model_dim", [](auto& c) -> auto& { return c.train.attention.model_dim; }));
    t.push_back(number<std::size_t>("attn_heads", [](auto& c) -> auto& { return c.train.attention.heads; }));
    t.push_back(
        number<std::size_t>("attn_key_dim", [](auto& c) -> auto& { return c.train.attention.key_dim; }));
    t.push_back(
        number<std::size_t>("attn_value_dim", [](auto& c) -> auto& { return c.train.attention.value_dim; }));
    t.push_back(number<std::size_t>("attn_blocks", [](auto& c) -> auto& { return c.train.attention.blocks; }));
    t.push_back(number<std::size_t>("attn_head_hidden",
                                    [](auto& c) -> auto& { return c.train.attention.head_hidden; }));
    t.push_back(flag("attn_residual", [](auto& c) -> auto& { return c.train.attention.residual; }));
    t.push_back(flag("attn_layer_norm", [](auto& c) -> auto& { return c.train.attention.layer_norm; }));
    return t;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries out;
  std::istringstream in(text);
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw RunConfigError("config line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!find_field(key)) {
      throw RunConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RunConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str());
  } catch (const RunConfigError& e) {
    throw RunConfigError(path.string() + ": " + e.what());
  }
}

RunConfig resolve_config(const ConfigEntries& entries) {
  RunConfig cfg;
  for (const auto& [key, value] : entries)
    if (key == "algo") find_field(key)->set(cfg, value);
  cfg.train = algo::default_config(cfg.algo);
  for (const auto& [key, value] : entries) {
    const auto* f = find_field(key);
    if (!f) throw RunConfigError("unknown config key '" + key + "'");
    f->set(cfg, value);
  }
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& f : fields()) os << f.key << " = " << f.get(cfg) << '\n';
  return os.str();
}

void validate(const RunConfig& cfg) {
  try {
    env::make_scenario(cfg.scenario, cfg.agents);
    algo::validate(cfg.train);
    algo::validate(algo::flags_for(cfg.algo));
  } catch (const std::invalid_argument& e) {
    throw RunConfigError(e.what());
  }
  if (cfg.episodes == 0) throw RunConfigError("episodes must be positive");
  if (cfg.smoothing_window == 0) throw RunConfigError("smoothing_window must be positive");
  if (cfg.flush_interval == 0) throw RunConfigError("flush_interval must be positive");
  if (cfg.prey.empty()) throw RunConfigError("prey must be 'scripted', 'learned' or a checkpoint directory");
  if (cfg.scenario != env::ScenarioKind::predator_prey && cfg.prey != "scripted") {
    throw RunConfigError("prey is only meaningful for predator_prey");
  }
}

}  // namespace samarl::harness
