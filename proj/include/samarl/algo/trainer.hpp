#pragma once

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "samarl/algo/config.hpp"
#include "samarl/algo/replay_buffer.hpp"
#include "samarl/algo/updates.hpp"
#include "samarl/ndmath/optim.hpp"
#include "samarl/nets/module.hpp"

namespace samarl::algo {

/// The trained agents: all of one type, with equal observation and action widths.
struct AgentLayout {
  std::size_t agents = 0;
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
};

template <typename T>
struct NetworkFactory {
  std::function<std::unique_ptr<nets::Actor<T>>(std::size_t agent, std::mt19937_64&)> actor;
  std::function<std::unique_ptr<nets::JointActor<T>>(std::mt19937_64&)> joint_actor;
  /// Slot s is the shared critic (attention) or agent s's own critic (baselines).
  std::function<std::unique_ptr<nets::Critic<T>>(std::size_t slot, std::mt19937_64&)> critic;
};

/// MLP actors, attention actor and attention or MLP critics sized from the config.
template <typename T>
NetworkFactory<T> default_networks(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout);

struct UpdateStats {
  double critic_loss = 0.0;  // mean over every critic of the step
  bool policy_updated = false;
  double policy_loss = 0.0;
  std::vector<double> actor_grad_norms;
};

/// Learners, targets and optimizers of one algorithm kind for one agent type.
template <typename T>
class Trainer {
 public:
  Trainer(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout, std::mt19937_64& init_rng);
  Trainer(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout,
          const NetworkFactory<T>& factory, std::mt19937_64& init_rng);
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// Actions for one step from agent-major observations. Exploration noise is
  /// added when `noise` is non-null, otherwise the policies act greedily.
  std::vector<T> act(std::span<const T> obs, std::mt19937_64* noise) const;

  /// Critic step on `batch`; when `policy`, also a policy step and a soft update of every target.
  UpdateStats update(const Batch<T>& batch, std::mt19937_64& target_noise, bool policy);

  /// Every parameter, sharing storage with the live networks. Names:
  /// actor{i}., target_actor{i}., joint_actor., target_joint_actor.,
  /// critic{s}.q{k}., target_critic{s}.q{k}. With `policies_only`, only the acting networks.
  std::vector<nets::NamedTensor<T>> named_tensors(bool policies_only = false) const;

  const AlgoFlags& flags() const { return flags_; }
  const TrainConfig& config() const { return cfg_; }
  const AgentLayout& layout() const { return layout_; }
  bool centralized() const { return flags_.attention_actor; }

  std::size_t critic_slots() const { return slots_.size(); }
  std::size_t critics_per_slot() const { return flags_.double_q ? 2 : 1; }
  nets::Critic<T>& critic(std::size_t slot, std::size_t k) { return *slots_.at(slot).main.at(k); }
  nets::Critic<T>& target_critic(std::size_t slot, std::size_t k) { return *slots_.at(slot).target.at(k); }
  nd::Adam<T>& critic_optimizer(std::size_t slot, std::size_t k) { return *slots_.at(slot).optimizer.at(k); }

  nets::Actor<T>& actor(std::size_t i) { return *actors_.at(i); }
  nets::Actor<T>& target_actor(std::size_t i) { return *target_actors_.at(i); }
  nd::Adam<T>& actor_optimizer(std::size_t i) { return *actor_optimizers_.at(i); }
  std::vector<const nets::Actor<T>*> actors() const;

  nets::JointActor<T>& joint_actor() { return *joint_; }
  nets::JointActor<T>& target_joint_actor() { return *target_joint_; }
  nd::Adam<T>& joint_optimizer() { return *joint_optimizer_; }

 private:
  struct CriticSlot {
    std::vector<std::unique_ptr<nets::Critic<T>>> main;
    std::vector<std::unique_ptr<nets::Critic<T>>> target;
    std::vector<std::unique_ptr<nd::Adam<T>>> optimizer;
  };

  std::vector<Tensor<T>> next_actions(const Batch<T>& batch, std::mt19937_64& rng) const;
  PolicyStepStats policy_step(const Batch<T>& batch);
  void soft_update_targets();

  AlgoFlags flags_;
  TrainConfig cfg_;
  AgentLayout layout_;
  std::vector<std::unique_ptr<nets::Actor<T>>> actors_;
  std::vector<std::unique_ptr<nets::Actor<T>>> target_actors_;
  std::vector<std::unique_ptr<nd::Adam<T>>> actor_optimizers_;
  std::unique_ptr<nets::JointActor<T>> joint_;
  std::unique_ptr<nets::JointActor<T>> target_joint_;
  std::unique_ptr<nd::Adam<T>> joint_optimizer_;
  std::vector<CriticSlot> slots_;
};

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace samarl::algo
