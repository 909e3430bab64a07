#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "samarl/algo/config.hpp"
#include "samarl/env/scenario.hpp"

namespace samarl::harness {

class RunConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything that defines one experiment.
struct RunConfig {
  env::ScenarioKind scenario = env::ScenarioKind::cooperative_navigation;
  algo::AlgoKind algo = algo::AlgoKind::sa_matd3;
  std::size_t agents = 3;
  std::uint64_t episodes = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out = "runs/run";
  /// "scripted", "learned" (prey trained alongside predators) or a checkpoint directory.
  std::string prey = "scripted";
  std::uint64_t eval_interval = 0;  // 0 disables periodic evaluation
  std::uint64_t eval_episodes = 10;
  std::uint64_t checkpoint_interval = 10000;
  std::uint64_t flush_interval = 100;
  std::size_t smoothing_window = 1000;
  algo::TrainConfig train = algo::default_config(algo::AlgoKind::sa_matd3);
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines; `#` starts a comment; blank lines are ignored.
/// Malformed lines and unknown keys throw RunConfigError naming the line.
ConfigEntries parse_config_text(const std::string& text);
ConfigEntries read_config_file(const std::filesystem::path& path);

/// Defaults, then the algorithm's learning rates, then every entry in order
/// (later entries win). Unknown keys and unparsable values throw RunConfigError.
RunConfig resolve_config(const ConfigEntries& entries);

/// Every key with its value, one per line, in a fixed order. Parsing the text
/// back through resolve_config reproduces the config exactly.
std::string to_config_text(const RunConfig& cfg);

/// All recognised keys in serialization order.
const std::vector<std::string>& config_keys();

void validate(const RunConfig& cfg);

}  // namespace samarl::harness
