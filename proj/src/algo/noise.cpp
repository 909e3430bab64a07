#include "samarl/algo/noise.hpp"

#include <algorithm>

namespace samarl::algo {

template <typename T>
void add_clipped_noise(std::span<T> values, double std, double low, double high, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : values) {
    const double noisy = static_cast<double>(v) + std * normal(rng);
    v = static_cast<T>(std::clamp(noisy, low, high));
  }
}

namespace {

template <typename T>
std::vector<Tensor<T>> noisy_copies(const std::vector<Tensor<T>>& clean, double std, double low, double high,
                                    std::mt19937_64& rng) {
  std::vector<Tensor<T>> out;
  out.reserve(clean.size());
  for (const auto& a : clean) {
    auto copy = a.detach();
    add_clipped_noise<T>(copy.mutable_data(), std, low, high, rng);
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace

template <typename T>
Tensor<T> explore_action(const nets::Actor<T>& actor, const Tensor<T>& obs, double e_act, double low, double high,
                         std::mt19937_64& rng) {
  nd::NoGradGuard guard;
  auto a = actor.forward(obs).detach();
  add_clipped_noise<T>(a.mutable_data(), e_act, low, high, rng);
  return a;
}

template <typename T>
std::vector<Tensor<T>> smoothed_target_actions(const std::vector<std::unique_ptr<nets::Actor<T>>>& targets,
                                               const std::vector<Tensor<T>>& next_obs, double e_critic, double low,
                                               double high, std::mt19937_64& rng) {
  if (targets.size() != next_obs.size()) throw nd::ContractError("smoothed_target_actions: agent count mismatch");
  nd::NoGradGuard guard;
  std::vector<Tensor<T>> clean;
  for (std::size_t i = 0; i < targets.size(); ++i) clean.push_back(targets[i]->forward(next_obs[i]));
  return noisy_copies(clean, e_critic, low, high, rng);
}

template <typename T>
std::vector<Tensor<T>> smoothed_target_actions(const nets::JointActor<T>& target, const std::vector<Tensor<T>>& next_obs,
                                               double e_critic, double low, double high, std::mt19937_64& rng) {
  nd::NoGradGuard guard;
  return noisy_copies(target.forward(next_obs), e_critic, low, high, rng);
}

#define SAMARL_INSTANTIATE_NOISE(T)                                                                              \
  template void add_clipped_noise<T>(std::span<T>, double, double, double, std::mt19937_64&);                    \
  template Tensor<T> explore_action(const nets::Actor<T>&, const Tensor<T>&, double, double, double,             \
                                    std::mt19937_64&);                                                           \
  template std::vector<Tensor<T>> smoothed_target_actions(const std::vector<std::unique_ptr<nets::Actor<T>>>&,   \
                                                          const std::vector<Tensor<T>>&, double, double, double, \
                                                          std::mt19937_64&);                                     \
  template std::vector<Tensor<T>> smoothed_target_actions(const nets::JointActor<T>&,                            \
                                                          const std::vector<Tensor<T>>&, double, double, double, \
                                                          std::mt19937_64&);

SAMARL_INSTANTIATE_NOISE(float)
SAMARL_INSTANTIATE_NOISE(double)

#undef SAMARL_INSTANTIATE_NOISE

}  // namespace samarl::algo
