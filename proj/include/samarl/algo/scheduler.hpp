#pragma once

#include <cstdint>

#include "samarl/algo/config.hpp"

namespace samarl::algo {

struct UpdateDecision {
  bool critic = false;
  bool policy = false;
};

/// Decides, after each finished episode, whether the learners update.
class UpdateScheduler {
 public:
  UpdateScheduler(const TrainConfig& cfg, bool delayed);

  /// `episode` is the 0-based index of the episode that just finished.
  UpdateDecision on_episode_end(std::uint64_t episode);

  std::uint64_t critic_updates() const { return critic_updates_; }
  std::uint64_t policy_updates() const { return policy_updates_; }

 private:
  std::uint64_t start_;
  std::uint64_t frequency_;
  std::uint64_t delay_;
  std::uint64_t critic_updates_ = 0;
  std::uint64_t policy_updates_ = 0;
};

}  // namespace samarl::algo
