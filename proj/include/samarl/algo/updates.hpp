#pragma once

#include <string>
#include <vector>

#include "samarl/ndmath/optim.hpp"
#include "samarl/nets/module.hpp"

namespace samarl::algo {

using nd::Tensor;

/// Reduces critic output [B x outputs] to the regressed value [B x 1]: the
/// column sum when `total`, otherwise the single column of a per-agent critic.
template <typename T>
Tensor<T> critic_value(const Tensor<T>& q, bool total);

/// y = r + gamma * (1 - d) * min_k value(target_k(next_obs, next_actions)).
/// One target gives the plain bootstrapped target; two give clipped double-Q.
/// Evaluated without gradient tracking; the result is a detached [B x 1].
template <typename T>
Tensor<T> bellman_target(const Tensor<T>& reward, const Tensor<T>& done, double gamma,
                         const std::vector<const nets::Critic<T>*>& targets, const std::vector<Tensor<T>>& next_obs,
                         const std::vector<Tensor<T>>& next_actions, bool total);

/// mean((value(critic(obs, actions)) - y)^2) as a differentiable scalar.
template <typename T>
Tensor<T> critic_loss(const nets::Critic<T>& critic, const std::vector<Tensor<T>>& obs,
                      const std::vector<Tensor<T>>& actions, const Tensor<T>& y, bool total);

/// Mean, min and max of rewards, targets and observations, for error reports.
template <typename T>
std::string describe_batch(const std::vector<Tensor<T>>& obs, const Tensor<T>& reward, const Tensor<T>& y);

struct CriticStepStats {
  std::vector<double> losses;      // one per critic, before the step
  std::vector<double> grad_norms;  // one per critic, before clipping
};

/// One Adam step per critic on its regression loss, gradients norm-clipped at
/// `clip`. Throws nd::NumericError carrying batch statistics when a loss is not finite.
template <typename T>
CriticStepStats critic_update(const std::vector<nets::Critic<T>*>& critics, const std::vector<nd::Adam<T>*>& optimizers,
                              const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& actions,
                              const Tensor<T>& reward, const Tensor<T>& y, bool total, double clip);

struct PolicyStepStats {
  double loss = 0.0;
  std::vector<double> grad_norms;  // one per stepped actor, before clipping
};

/// -mean(total value of critic(obs, actors(obs))) with every action freshly generated.
template <typename T>
Tensor<T> one_to_all_loss(const std::vector<const nets::Actor<T>*>& actors, const nets::Critic<T>& critic,
                          const std::vector<Tensor<T>>& obs);
template <typename T>
Tensor<T> one_to_all_loss(const nets::JointActor<T>& actor, const nets::Critic<T>& critic,
                          const std::vector<Tensor<T>>& obs);

/// Every actor steps from a single evaluation of the frozen critic.
template <typename T>
PolicyStepStats policy_update_one_to_all(const std::vector<nets::Actor<T>*>& actors,
                                         const std::vector<nd::Adam<T>*>& optimizers, nets::Critic<T>& critic,
                                         const std::vector<Tensor<T>>& obs, double clip);
template <typename T>
PolicyStepStats policy_update_one_to_all(nets::JointActor<T>& actor, nd::Adam<T>& optimizer, nets::Critic<T>& critic,
                                         const std::vector<Tensor<T>>& obs, double clip);

/// Agent `agent` regenerates its action; the others keep the stored ones. Only
/// that actor steps. A multi-output critic contributes column `agent`.
template <typename T>
PolicyStepStats policy_update_one_to_one(nets::Actor<T>& actor, nd::Adam<T>& optimizer, nets::Critic<T>& critic,
                                         std::size_t agent, const std::vector<Tensor<T>>& obs,
                                         const std::vector<Tensor<T>>& stored_actions, double clip);

}  // namespace samarl::algo
