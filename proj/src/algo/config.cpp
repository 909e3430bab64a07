#include "samarl/algo/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace samarl::algo {

namespace {

constexpr std::array<std::pair<AlgoKind, std::string_view>, 6> kNames{{
    {AlgoKind::maddpg, "MADDPG"},
    {AlgoKind::matd3, "MATD3"},
    {AlgoKind::sa_maddpg, "SA_MADDPG"},
    {AlgoKind::sa_matd3, "SA_MATD3"},
    {AlgoKind::dsa_maddpg, "DSA_MADDPG"},
    {AlgoKind::dsa_matd3, "DSA_MATD3"},
}};

}  // namespace

std::string_view algo_name(AlgoKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "?";
}

AlgoKind parse_algo(std::string_view name) {
  std::string norm(name);
  std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (const auto& [k, n] : kNames)
    if (n == norm) return k;
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected MADDPG, MATD3, SA_MADDPG, SA_MATD3, DSA_MADDPG or DSA_MATD3)");
}

AlgoFlags flags_for(AlgoKind kind) {
  AlgoFlags f;
  const bool td3 = kind == AlgoKind::matd3 || kind == AlgoKind::sa_matd3 || kind == AlgoKind::dsa_matd3;
  f.double_q = f.delayed = f.smoothing = td3;
  const bool sa = kind != AlgoKind::maddpg && kind != AlgoKind::matd3;
  f.attention_critic = f.total_q = f.one_to_all = sa;
  f.attention_actor = kind == AlgoKind::dsa_maddpg || kind == AlgoKind::dsa_matd3;
  return f;
}

TrainConfig default_config(AlgoKind kind) {
  TrainConfig cfg;
  const auto f = flags_for(kind);
  cfg.critic_lr = f.attention_critic ? 1e-4 : 1e-3;
  cfg.actor_lr = f.attention_actor ? 1e-4 : 1e-3;
  return cfg;
}

void validate(const TrainConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid training config: " + msg); };
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) fail("tau must lie in (0, 1]");
  if (!(cfg.actor_lr > 0.0) || !(cfg.critic_lr > 0.0)) fail("learning rates must be positive");
  if (!(cfg.grad_clip > 0.0)) fail("grad_clip must be positive");
  if (!(cfg.action_noise >= 0.0) || !(cfg.critic_noise >= 0.0)) fail("noise deviations must be non-negative");
  if (!(cfg.action_low < cfg.action_high)) fail("action_low must be below action_high");
  if (cfg.batch_size == 0) fail("batch_size must be positive");
  if (cfg.buffer_capacity < cfg.batch_size) fail("buffer_capacity must hold at least one batch");
  if (cfg.train_frequency == 0) fail("train_frequency must be positive");
  if (cfg.delay_frequency == 0) fail("delay_frequency must be positive");
  if (cfg.mlp.hidden == 0) fail("mlp hidden width must be positive");
  if (cfg.attention.heads == 0 || cfg.attention.key_dim == 0 || cfg.attention.value_dim == 0 ||
      cfg.attention.model_dim == 0 || cfg.attention.head_hidden == 0)
    fail("attention dimensions must be positive");
}

void validate(const AlgoFlags& flags) {
  if (flags.one_to_all && !flags.attention_critic) {
    throw ConfigError("one-to-all policy updates need the shared attention critic");
  }
  if (flags.attention_critic && !flags.total_q) {
    throw ConfigError("the shared attention critic regresses the total value and needs total_q");
  }
  if (flags.attention_actor && !flags.one_to_all) {
    throw ConfigError("the attention actor is updated jointly and needs one-to-all updates");
  }
}

}  // namespace samarl::algo
