#include "samarl/algo/scheduler.hpp"

namespace samarl::algo {

UpdateScheduler::UpdateScheduler(const TrainConfig& cfg, bool delayed)
    : start_(cfg.train_start_episodes), frequency_(cfg.train_frequency), delay_(delayed ? cfg.delay_frequency : 1) {
  if (frequency_ == 0 || delay_ == 0) throw ConfigError("scheduler: frequencies must be positive");
}

UpdateDecision UpdateScheduler::on_episode_end(std::uint64_t episode) {
  UpdateDecision d;
  if (episode < start_ || episode % frequency_ != 0) return d;
  d.critic = true;
  ++critic_updates_;
  if (critic_updates_ % delay_ == 0) {
    d.policy = true;
    ++policy_updates_;
  }
  return d;
}

}  // namespace samarl::algo
