#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "samarl/nets/module.hpp"

namespace samarl::algo {

using nd::Tensor;

/// In place: x <- clip(x + std * N(0, 1), low, high). One normal draw per
/// component regardless of std, so RNG streams stay aligned across settings.
template <typename T>
void add_clipped_noise(std::span<T> values, double std, double low, double high, std::mt19937_64& rng);

/// clip(actor(obs) + N(0, e_act), low, high) for a batch of observations [B x obs_dim].
template <typename T>
Tensor<T> explore_action(const nets::Actor<T>& actor, const Tensor<T>& obs, double e_act, double low, double high,
                         std::mt19937_64& rng);

/// Per-agent target actions with clipped Gaussian smoothing noise. Computed without gradient tracking.
template <typename T>
std::vector<Tensor<T>> smoothed_target_actions(const std::vector<std::unique_ptr<nets::Actor<T>>>& targets,
                                               const std::vector<Tensor<T>>& next_obs, double e_critic, double low,
                                               double high, std::mt19937_64& rng);

template <typename T>
std::vector<Tensor<T>> smoothed_target_actions(const nets::JointActor<T>& target, const std::vector<Tensor<T>>& next_obs,
                                               double e_critic, double low, double high, std::mt19937_64& rng);

}  // namespace samarl::algo
