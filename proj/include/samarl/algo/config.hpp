#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "samarl/nets/attention.hpp"
#include "samarl/nets/mlp.hpp"

namespace samarl::algo {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AlgoKind { maddpg, matd3, sa_maddpg, sa_matd3, dsa_maddpg, dsa_matd3 };

std::string_view algo_name(AlgoKind kind);
/// Case-insensitive; accepts "MADDPG", "sa-matd3", "SA_MATD3", ...
AlgoKind parse_algo(std::string_view name);

/// Switches that select one point of the trainer family.
struct AlgoFlags {
  bool double_q = false;
  bool delayed = false;
  bool smoothing = false;
  bool attention_critic = false;
  bool attention_actor = false;
  bool total_q = false;
  bool one_to_all = false;

  friend bool operator==(const AlgoFlags&, const AlgoFlags&) = default;
};

AlgoFlags flags_for(AlgoKind kind);

struct TrainConfig {
  double gamma = 0.95;
  double tau = 0.01;
  std::size_t batch_size = 512;
  std::size_t buffer_capacity = 100000;
  std::uint64_t train_start_episodes = 10000;
  std::uint64_t train_frequency = 5;
  std::uint64_t delay_frequency = 2;
  double action_noise = 0.002;
  double critic_noise = 0.001;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double grad_clip = 1.0;
  double action_low = -1.0;
  double action_high = 1.0;

  nets::MlpShape mlp{};
  nets::AttentionConfig attention{};
};

/// Defaults with the learning rates matched to the network family:
/// attention networks 1e-4, MLP networks 1e-3.
TrainConfig default_config(AlgoKind kind);

/// Throws ConfigError naming the first violated rule.
void validate(const TrainConfig& cfg);
void validate(const AlgoFlags& flags);

}  // namespace samarl::algo
