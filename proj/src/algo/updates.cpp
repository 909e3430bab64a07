#include "samarl/algo/updates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "samarl/ndmath/ops.hpp"
#include "samarl/nets/critic.hpp"

namespace samarl::algo {

using nd::ContractError;

namespace {

template <typename T>
class FreezeGuard {
 public:
  explicit FreezeGuard(nets::Module<T>& module) : module_(module) { module_.set_requires_grad(false); }
  ~FreezeGuard() { module_.set_requires_grad(true); }
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  nets::Module<T>& module_;
};

template <typename T>
void summarize(std::ostringstream& os, const char* label, std::span<const T> values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  std::size_t non_finite = 0;
  for (T v : values) {
    const double d = static_cast<double>(v);
    if (!std::isfinite(d)) {
      ++non_finite;
      continue;
    }
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  const std::size_t finite = values.size() - non_finite;
  os << ' ' << label << "{mean=" << (finite ? sum / static_cast<double>(finite) : 0.0) << " min=" << lo
     << " max=" << hi << " non_finite=" << non_finite << '}';
}

template <typename T>
double step_with_clip(std::vector<Tensor<T>> params, nd::Adam<T>& optimizer, double clip) {
  const double norm = nd::clip_grad_norm<T>(params, clip);
  optimizer.step();
  return norm;
}

template <typename T>
void check_agents(std::size_t obs, std::size_t acts, const char* where) {
  if (obs != acts) {
    throw ContractError(std::string(where) + ": " + std::to_string(obs) + " observation blocks but " +
                        std::to_string(acts) + " action blocks");
  }
}

}  // namespace

template <typename T>
Tensor<T> critic_value(const Tensor<T>& q, bool total) {
  if (q.rank() != 2) throw nd::DimensionError("critic_value: expected a [B x outputs] matrix");
  if (total) return nets::total_q(q);
  if (q.dim(1) != 1) {
    throw ContractError("critic_value: a per-agent value needs a single-output critic, got " +
                        std::to_string(q.dim(1)) + " outputs");
  }
  return q;
}

template <typename T>
Tensor<T> bellman_target(const Tensor<T>& reward, const Tensor<T>& done, double gamma,
                         const std::vector<const nets::Critic<T>*>& targets, const std::vector<Tensor<T>>& next_obs,
                         const std::vector<Tensor<T>>& next_actions, bool total) {
  if (targets.empty()) throw ContractError("bellman_target: no target critic");
  check_agents<T>(next_obs.size(), next_actions.size(), "bellman_target");
  nd::NoGradGuard guard;
  Tensor<T> value = critic_value(targets[0]->forward(next_obs, next_actions), total);
  for (std::size_t k = 1; k < targets.size(); ++k) {
    value = nets::double_min(value, critic_value(targets[k]->forward(next_obs, next_actions), total));
  }
  if (reward.shape() != value.shape() || done.shape() != value.shape()) {
    throw nd::DimensionError("bellman_target: reward/done must be [B x 1] matching the critic batch");
  }
  std::vector<T> y(value.size());
  const auto q = value.data(), r = reward.data(), d = done.data();
  for (std::size_t b = 0; b < y.size(); ++b) {
    y[b] = static_cast<T>(static_cast<double>(r[b]) +
                          gamma * (1.0 - static_cast<double>(d[b])) * static_cast<double>(q[b]));
  }
  return Tensor<T>(value.shape(), std::move(y));
}

template <typename T>
Tensor<T> critic_loss(const nets::Critic<T>& critic, const std::vector<Tensor<T>>& obs,
                      const std::vector<Tensor<T>>& actions, const Tensor<T>& y, bool total) {
  check_agents<T>(obs.size(), actions.size(), "critic_loss");
  return nd::mse(critic_value(critic.forward(obs, actions), total), y.detach());
}

template <typename T>
std::string describe_batch(const std::vector<Tensor<T>>& obs, const Tensor<T>& reward, const Tensor<T>& y) {
  std::ostringstream os;
  os << "batch statistics:";
  if (reward.defined()) summarize<T>(os, "reward", reward.data());
  if (y.defined()) summarize<T>(os, "target", y.data());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string label = "obs" + std::to_string(i);
    summarize<T>(os, label.c_str(), obs[i].data());
  }
  return os.str();
}

template <typename T>
CriticStepStats critic_update(const std::vector<nets::Critic<T>*>& critics, const std::vector<nd::Adam<T>*>& optimizers,
                              const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& actions,
                              const Tensor<T>& reward, const Tensor<T>& y, bool total, double clip) {
  if (critics.size() != optimizers.size()) throw ContractError("critic_update: one optimizer per critic required");
  CriticStepStats stats;
  for (std::size_t k = 0; k < critics.size(); ++k) {
    auto& critic = *critics[k];
    critic.zero_grad();
    const auto loss = critic_loss(critic, obs, actions, y, total);
    const double value = static_cast<double>(loss.item());
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "critic " << k << " loss is not finite (" << value << "); " << describe_batch(obs, reward, y);
      throw nd::NumericError(os.str());
    }
    nd::backward(loss);
    stats.losses.push_back(value);
    stats.grad_norms.push_back(step_with_clip(critic.parameters(), *optimizers[k], clip));
  }
  return stats;
}

template <typename T>
Tensor<T> one_to_all_loss(const std::vector<const nets::Actor<T>*>& actors, const nets::Critic<T>& critic,
                          const std::vector<Tensor<T>>& obs) {
  check_agents<T>(obs.size(), actors.size(), "one_to_all_loss");
  std::vector<Tensor<T>> actions;
  actions.reserve(actors.size());
  for (std::size_t i = 0; i < actors.size(); ++i) actions.push_back(actors[i]->forward(obs[i]));
  return nd::scale(nd::mean(nets::total_q(critic.forward(obs, actions))), T(-1));
}

template <typename T>
Tensor<T> one_to_all_loss(const nets::JointActor<T>& actor, const nets::Critic<T>& critic,
                          const std::vector<Tensor<T>>& obs) {
  return nd::scale(nd::mean(nets::total_q(critic.forward(obs, actor.forward(obs)))), T(-1));
}

template <typename T>
PolicyStepStats policy_update_one_to_all(const std::vector<nets::Actor<T>*>& actors,
                                         const std::vector<nd::Adam<T>*>& optimizers, nets::Critic<T>& critic,
                                         const std::vector<Tensor<T>>& obs, double clip) {
  if (actors.size() != optimizers.size()) throw ContractError("policy_update_one_to_all: one optimizer per actor");
  FreezeGuard<T> frozen(critic);
  for (auto* a : actors) a->zero_grad();
  const std::vector<const nets::Actor<T>*> view(actors.begin(), actors.end());
  const auto loss = one_to_all_loss(view, critic, obs);
  nd::backward(loss);
  PolicyStepStats stats;
  stats.loss = static_cast<double>(loss.item());
  for (std::size_t i = 0; i < actors.size(); ++i) {
    stats.grad_norms.push_back(step_with_clip(actors[i]->parameters(), *optimizers[i], clip));
  }
  return stats;
}

template <typename T>
PolicyStepStats policy_update_one_to_all(nets::JointActor<T>& actor, nd::Adam<T>& optimizer, nets::Critic<T>& critic,
                                         const std::vector<Tensor<T>>& obs, double clip) {
  FreezeGuard<T> frozen(critic);
  actor.zero_grad();
  const auto loss = one_to_all_loss(actor, critic, obs);
  nd::backward(loss);
  PolicyStepStats stats;
  stats.loss = static_cast<double>(loss.item());
  stats.grad_norms.push_back(step_with_clip(actor.parameters(), optimizer, clip));
  return stats;
}

template <typename T>
PolicyStepStats policy_update_one_to_one(nets::Actor<T>& actor, nd::Adam<T>& optimizer, nets::Critic<T>& critic,
                                         std::size_t agent, const std::vector<Tensor<T>>& obs,
                                         const std::vector<Tensor<T>>& stored_actions, double clip) {
  check_agents<T>(obs.size(), stored_actions.size(), "policy_update_one_to_one");
  if (agent >= obs.size()) throw ContractError("policy_update_one_to_one: agent index out of range");
  FreezeGuard<T> frozen(critic);
  actor.zero_grad();
  auto actions = stored_actions;
  actions[agent] = actor.forward(obs[agent]);
  auto q = critic.forward(obs, actions);
  if (q.dim(1) > 1) q = nd::slice_cols(q, agent, agent + 1);
  const auto loss = nd::scale(nd::mean(q), T(-1));
  nd::backward(loss);
  PolicyStepStats stats;
  stats.loss = static_cast<double>(loss.item());
  stats.grad_norms.push_back(step_with_clip(actor.parameters(), optimizer, clip));
  return stats;
}

#define SAMARL_INSTANTIATE_UPDATES(T)                                                                                \
  template Tensor<T> critic_value(const Tensor<T>&, bool);                                                           \
  template Tensor<T> bellman_target(const Tensor<T>&, const Tensor<T>&, double,                                      \
                                    const std::vector<const nets::Critic<T>*>&, const std::vector<Tensor<T>>&,       \
                                    const std::vector<Tensor<T>>&, bool);                                            \
  template Tensor<T> critic_loss(const nets::Critic<T>&, const std::vector<Tensor<T>>&,                              \
                                 const std::vector<Tensor<T>>&, const Tensor<T>&, bool);                             \
  template std::string describe_batch(const std::vector<Tensor<T>>&, const Tensor<T>&, const Tensor<T>&);            \
  template CriticStepStats critic_update(const std::vector<nets::Critic<T>*>&, const std::vector<nd::Adam<T>*>&,     \
                                         const std::vector<Tensor<T>>&, const std::vector<Tensor<T>>&,               \
                                         const Tensor<T>&, const Tensor<T>&, bool, double);                          \
  template Tensor<T> one_to_all_loss(const std::vector<const nets::Actor<T>*>&, const nets::Critic<T>&,              \
                                     const std::vector<Tensor<T>>&);                                                 \
  template Tensor<T> one_to_all_loss(const nets::JointActor<T>&, const nets::Critic<T>&,                             \
                                     const std::vector<Tensor<T>>&);                                                 \
  template PolicyStepStats policy_update_one_to_all(const std::vector<nets::Actor<T>*>&,                             \
                                                    const std::vector<nd::Adam<T>*>&, nets::Critic<T>&,              \
                                                    const std::vector<Tensor<T>>&, double);                          \
  template PolicyStepStats policy_update_one_to_all(nets::JointActor<T>&, nd::Adam<T>&, nets::Critic<T>&,            \
                                                    const std::vector<Tensor<T>>&, double);                          \
  template PolicyStepStats policy_update_one_to_one(nets::Actor<T>&, nd::Adam<T>&, nets::Critic<T>&, std::size_t,    \
                                                    const std::vector<Tensor<T>>&, const std::vector<Tensor<T>>&,    \
                                                    double);

SAMARL_INSTANTIATE_UPDATES(float)
SAMARL_INSTANTIATE_UPDATES(double)

#undef SAMARL_INSTANTIATE_UPDATES

}  // namespace samarl::algo
