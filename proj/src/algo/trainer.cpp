#include "samarl/algo/trainer.hpp"

#include <numeric>
#include <string>

#include "samarl/algo/noise.hpp"
#include "samarl/nets/attention.hpp"
#include "samarl/nets/mlp.hpp"

namespace samarl::algo {

using nd::ContractError;

template <typename T>
NetworkFactory<T> default_networks(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout) {
  NetworkFactory<T> f;
  f.actor = [cfg, layout](std::size_t, std::mt19937_64& rng) -> std::unique_ptr<nets::Actor<T>> {
    return std::make_unique<nets::MlpActor<T>>(layout.obs_dim, layout.act_dim, cfg.mlp, rng);
  };
  f.joint_actor = [cfg, layout](std::mt19937_64& rng) -> std::unique_ptr<nets::JointActor<T>> {
    return std::make_unique<nets::AttentionActor<T>>(layout.obs_dim, layout.act_dim, cfg.attention, rng);
  };
  if (flags.attention_critic) {
    f.critic = [cfg, layout](std::size_t, std::mt19937_64& rng) -> std::unique_ptr<nets::Critic<T>> {
      return std::make_unique<nets::AttentionCritic<T>>(layout.obs_dim, layout.act_dim, layout.agents, cfg.attention,
                                                        rng);
    };
  } else {
    f.critic = [cfg, layout](std::size_t, std::mt19937_64& rng) -> std::unique_ptr<nets::Critic<T>> {
      return std::make_unique<nets::MlpCritic<T>>(layout.agents * (layout.obs_dim + layout.act_dim), cfg.mlp, rng);
    };
  }
  return f;
}

template <typename T>
Trainer<T>::Trainer(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout,
                    std::mt19937_64& init_rng)
    : Trainer(flags, cfg, layout, default_networks<T>(flags, cfg, layout), init_rng) {}

template <typename T>
Trainer<T>::Trainer(const AlgoFlags& flags, const TrainConfig& cfg, const AgentLayout& layout,
                    const NetworkFactory<T>& factory, std::mt19937_64& init_rng)
    : flags_(flags), cfg_(cfg), layout_(layout) {
  validate(flags_);
  validate(cfg_);
  if (layout.agents == 0 || layout.obs_dim == 0 || layout.act_dim == 0) {
    throw ConfigError("trainer: agent layout dimensions must be positive");
  }
  auto actor_options = [&] { return nd::AdamOptions<T>{.lr = static_cast<T>(cfg_.actor_lr)}; };
  auto critic_options = [&] { return nd::AdamOptions<T>{.lr = static_cast<T>(cfg_.critic_lr)}; };

  if (centralized()) {
    joint_ = factory.joint_actor(init_rng);
    target_joint_ = joint_->clone();
    target_joint_->set_requires_grad(false);
    joint_optimizer_ = std::make_unique<nd::Adam<T>>(joint_->parameters(), actor_options());
  } else {
    for (std::size_t i = 0; i < layout.agents; ++i) {
      actors_.push_back(factory.actor(i, init_rng));
      if (actors_.back()->obs_dim() != layout.obs_dim || actors_.back()->act_dim() != layout.act_dim) {
        throw ContractError("trainer: actor " + std::to_string(i) + " does not match the agent layout");
      }
      target_actors_.push_back(actors_.back()->clone());
      target_actors_.back()->set_requires_grad(false);
      actor_optimizers_.push_back(std::make_unique<nd::Adam<T>>(actors_.back()->parameters(), actor_options()));
    }
  }

  const std::size_t slots = flags.attention_critic ? 1 : layout.agents;
  slots_.resize(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    for (std::size_t k = 0; k < critics_per_slot(); ++k) {
      auto& slot = slots_[s];
      slot.main.push_back(factory.critic(s, init_rng));
      slot.target.push_back(slot.main.back()->clone());
      slot.target.back()->set_requires_grad(false);
      slot.optimizer.push_back(std::make_unique<nd::Adam<T>>(slot.main.back()->parameters(), critic_options()));
    }
  }
}

template <typename T>
std::vector<const nets::Actor<T>*> Trainer<T>::actors() const {
  std::vector<const nets::Actor<T>*> out;
  for (const auto& a : actors_) out.push_back(a.get());
  return out;
}

template <typename T>
std::vector<T> Trainer<T>::act(std::span<const T> obs, std::mt19937_64* noise) const {
  const std::size_t n = layout_.agents, od = layout_.obs_dim;
  if (obs.size() != n * od) {
    throw ContractError("trainer: expected " + std::to_string(n * od) + " observation values, got " +
                        std::to_string(obs.size()));
  }
  std::vector<Tensor<T>> per_agent;
  for (std::size_t i = 0; i < n; ++i) {
    per_agent.emplace_back(nd::Shape{1, od}, std::vector<T>(obs.begin() + i * od, obs.begin() + (i + 1) * od));
  }
  std::vector<T> out;
  out.reserve(n * layout_.act_dim);
  const double std = noise ? cfg_.action_noise : 0.0;
  if (centralized()) {
    std::vector<Tensor<T>> actions;
    {
      nd::NoGradGuard guard;
      actions = joint_->forward(per_agent);
    }
    for (auto& a : actions) {
      auto values = a.detach();
      if (noise) add_clipped_noise<T>(values.mutable_data(), std, cfg_.action_low, cfg_.action_high, *noise);
      out.insert(out.end(), values.data().begin(), values.data().end());
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Tensor<T> a;
    if (noise) {
      a = explore_action(*actors_[i], per_agent[i], std, cfg_.action_low, cfg_.action_high, *noise);
    } else {
      nd::NoGradGuard guard;
      a = actors_[i]->forward(per_agent[i]);
    }
    out.insert(out.end(), a.data().begin(), a.data().end());
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> Trainer<T>::next_actions(const Batch<T>& batch, std::mt19937_64& rng) const {
  const double std = flags_.smoothing ? cfg_.critic_noise : 0.0;
  if (centralized()) {
    return smoothed_target_actions(*target_joint_, batch.next_obs, std, cfg_.action_low, cfg_.action_high, rng);
  }
  return smoothed_target_actions(target_actors_, batch.next_obs, std, cfg_.action_low, cfg_.action_high, rng);
}

template <typename T>
PolicyStepStats Trainer<T>::policy_step(const Batch<T>& batch) {
  if (flags_.one_to_all) {
    auto& critic = *slots_.front().main.front();
    if (centralized()) return policy_update_one_to_all(*joint_, *joint_optimizer_, critic, batch.obs, cfg_.grad_clip);
    std::vector<nets::Actor<T>*> actors;
    std::vector<nd::Adam<T>*> optimizers;
    for (std::size_t i = 0; i < actors_.size(); ++i) {
      actors.push_back(actors_[i].get());
      optimizers.push_back(actor_optimizers_[i].get());
    }
    return policy_update_one_to_all(actors, optimizers, critic, batch.obs, cfg_.grad_clip);
  }
  PolicyStepStats total;
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    auto& critic = *slots_[slots_.size() == 1 ? 0 : i].main.front();
    const auto s = policy_update_one_to_one(*actors_[i], *actor_optimizers_[i], critic, i, batch.obs, batch.actions,
                                            cfg_.grad_clip);
    total.loss += s.loss / static_cast<double>(actors_.size());
    total.grad_norms.push_back(s.grad_norms.front());
  }
  return total;
}

template <typename T>
void Trainer<T>::soft_update_targets() {
  for (std::size_t i = 0; i < actors_.size(); ++i) nets::soft_update(*target_actors_[i], *actors_[i], cfg_.tau);
  if (joint_) nets::soft_update(*target_joint_, *joint_, cfg_.tau);
  for (auto& slot : slots_) {
    for (std::size_t k = 0; k < slot.main.size(); ++k) nets::soft_update(*slot.target[k], *slot.main[k], cfg_.tau);
  }
}

template <typename T>
UpdateStats Trainer<T>::update(const Batch<T>& batch, std::mt19937_64& target_noise, bool policy) {
  if (batch.obs.size() != layout_.agents || batch.actions.size() != layout_.agents ||
      batch.next_obs.size() != layout_.agents) {
    throw ContractError("trainer: batch agent count does not match the layout");
  }
  const auto next = next_actions(batch, target_noise);
  UpdateStats stats;
  std::size_t count = 0;
  for (auto& slot : slots_) {
    std::vector<const nets::Critic<T>*> targets;
    std::vector<nets::Critic<T>*> mains;
    std::vector<nd::Adam<T>*> optimizers;
    for (std::size_t k = 0; k < slot.main.size(); ++k) {
      targets.push_back(slot.target[k].get());
      mains.push_back(slot.main[k].get());
      optimizers.push_back(slot.optimizer[k].get());
    }
    const auto y = bellman_target(batch.reward, batch.done, cfg_.gamma, targets, batch.next_obs, next, flags_.total_q);
    const auto s = critic_update(mains, optimizers, batch.obs, batch.actions, batch.reward, y, flags_.total_q,
                                 cfg_.grad_clip);
    stats.critic_loss += std::accumulate(s.losses.begin(), s.losses.end(), 0.0);
    count += s.losses.size();
  }
  stats.critic_loss /= static_cast<double>(count);
  if (policy) {
    const auto p = policy_step(batch);
    stats.policy_updated = true;
    stats.policy_loss = p.loss;
    stats.actor_grad_norms = p.grad_norms;
    soft_update_targets();
  }
  return stats;
}

template <typename T>
std::vector<nets::NamedTensor<T>> Trainer<T>::named_tensors(bool policies_only) const {
  std::vector<nets::NamedTensor<T>> out;
  for (std::size_t i = 0; i < actors_.size(); ++i) actors_[i]->collect("actor" + std::to_string(i) + ".", out);
  if (joint_) joint_->collect("joint_actor.", out);
  if (policies_only) return out;
  for (std::size_t i = 0; i < target_actors_.size(); ++i) {
    target_actors_[i]->collect("target_actor" + std::to_string(i) + ".", out);
  }
  if (target_joint_) target_joint_->collect("target_joint_actor.", out);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    for (std::size_t k = 0; k < slots_[s].main.size(); ++k) {
      const std::string tag = std::to_string(s) + ".q" + std::to_string(k + 1) + ".";
      slots_[s].main[k]->collect("critic" + tag, out);
      slots_[s].target[k]->collect("target_critic" + tag, out);
    }
  }
  return out;
}

template NetworkFactory<float> default_networks<float>(const AlgoFlags&, const TrainConfig&, const AgentLayout&);
template NetworkFactory<double> default_networks<double>(const AlgoFlags&, const TrainConfig&, const AgentLayout&);
template class Trainer<float>;
template class Trainer<double>;

}  // namespace samarl::algo
