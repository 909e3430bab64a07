#include "samarl/algo/replay_buffer.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace samarl::algo {

using nd::ContractError;

template <typename T>
ReplayBuffer<T>::ReplayBuffer(std::size_t capacity, std::size_t agents, std::size_t obs_dim, std::size_t act_dim)
    : capacity_(capacity), agents_(agents), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0 || agents == 0 || obs_dim == 0 || act_dim == 0) {
    throw ContractError("replay buffer: capacity and layout dimensions must be positive");
  }
  obs_.resize(capacity * agents * obs_dim);
  next_obs_.resize(capacity * agents * obs_dim);
  actions_.resize(capacity * agents * act_dim);
  reward_.resize(capacity);
  done_.resize(capacity);
}

template <typename T>
void ReplayBuffer<T>::push(const Transition<T>& t) {
  const std::size_t ow = agents_ * obs_dim_, aw = agents_ * act_dim_;
  if (t.obs.size() != ow || t.next_obs.size() != ow || t.actions.size() != aw) {
    throw ContractError("replay buffer: transition layout (" + std::to_string(t.obs.size()) + ", " +
                        std::to_string(t.actions.size()) + ", " + std::to_string(t.next_obs.size()) +
                        ") does not match (" + std::to_string(ow) + ", " + std::to_string(aw) + ", " +
                        std::to_string(ow) + ")");
  }
  std::copy(t.obs.begin(), t.obs.end(), obs_.begin() + cursor_ * ow);
  std::copy(t.next_obs.begin(), t.next_obs.end(), next_obs_.begin() + cursor_ * ow);
  std::copy(t.actions.begin(), t.actions.end(), actions_.begin() + cursor_ * aw);
  reward_[cursor_] = t.reward;
  done_[cursor_] = t.done ? T(1) : T(0);
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

template <typename T>
std::size_t ReplayBuffer<T>::slot(std::size_t index) const {
  // Oldest entry sits at the cursor once the ring has wrapped.
  return size_ < capacity_ ? index : (cursor_ + index) % capacity_;
}

template <typename T>
std::vector<std::size_t> ReplayBuffer<T>::sample_indices(std::size_t batch, std::mt19937_64& rng) const {
  if (batch == 0 || size_ < batch) {
    throw ContractError("replay buffer: cannot sample " + std::to_string(batch) + " from " + std::to_string(size_) +
                        " stored transitions");
  }
  // Floyd's algorithm: `batch` distinct values, each subset equally likely.
  std::vector<std::size_t> out;
  out.reserve(batch);
  std::unordered_set<std::size_t> seen;
  seen.reserve(batch * 2);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    const std::size_t r = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    const std::size_t pick = seen.count(r) ? j : r;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

template <typename T>
Batch<T> ReplayBuffer<T>::gather(const std::vector<std::size_t>& indices) const {
  const std::size_t b = indices.size();
  Batch<T> out;
  out.indices = indices;
  std::vector<std::vector<T>> obs(agents_, std::vector<T>(b * obs_dim_));
  std::vector<std::vector<T>> next(agents_, std::vector<T>(b * obs_dim_));
  std::vector<std::vector<T>> act(agents_, std::vector<T>(b * act_dim_));
  std::vector<T> reward(b), done(b);
  const std::size_t ow = agents_ * obs_dim_, aw = agents_ * act_dim_;
  for (std::size_t r = 0; r < b; ++r) {
    if (indices[r] >= size_) throw ContractError("replay buffer: index out of range");
    const std::size_t s = slot(indices[r]);
    for (std::size_t i = 0; i < agents_; ++i) {
      std::copy_n(obs_.begin() + s * ow + i * obs_dim_, obs_dim_, obs[i].begin() + r * obs_dim_);
      std::copy_n(next_obs_.begin() + s * ow + i * obs_dim_, obs_dim_, next[i].begin() + r * obs_dim_);
      std::copy_n(actions_.begin() + s * aw + i * act_dim_, act_dim_, act[i].begin() + r * act_dim_);
    }
    reward[r] = reward_[s];
    done[r] = done_[s];
  }
  for (std::size_t i = 0; i < agents_; ++i) {
    out.obs.emplace_back(nd::Shape{b, obs_dim_}, std::move(obs[i]));
    out.next_obs.emplace_back(nd::Shape{b, obs_dim_}, std::move(next[i]));
    out.actions.emplace_back(nd::Shape{b, act_dim_}, std::move(act[i]));
  }
  out.reward = Tensor<T>({b, 1}, std::move(reward));
  out.done = Tensor<T>({b, 1}, std::move(done));
  return out;
}

template <typename T>
Batch<T> ReplayBuffer<T>::sample(std::size_t batch, std::mt19937_64& rng) const {
  return gather(sample_indices(batch, rng));
}

template <typename T>
Transition<T> ReplayBuffer<T>::at(std::size_t index) const {
  if (index >= size_) throw ContractError("replay buffer: index out of range");
  const std::size_t s = slot(index);
  const std::size_t ow = agents_ * obs_dim_, aw = agents_ * act_dim_;
  Transition<T> t;
  t.obs.assign(obs_.begin() + s * ow, obs_.begin() + (s + 1) * ow);
  t.next_obs.assign(next_obs_.begin() + s * ow, next_obs_.begin() + (s + 1) * ow);
  t.actions.assign(actions_.begin() + s * aw, actions_.begin() + (s + 1) * aw);
  t.reward = reward_[s];
  t.done = done_[s] != T(0);
  return t;
}

template class ReplayBuffer<float>;
template class ReplayBuffer<double>;

}  // namespace samarl::algo
