#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::algo {

using nd::Tensor;

/// One environment step for the trained agents. Observations and actions are
/// agent-major: agent i occupies [i*obs_dim, (i+1)*obs_dim).
template <typename T>
struct Transition {
  std::vector<T> obs;
  std::vector<T> actions;
  T reward = T(0);
  std::vector<T> next_obs;
  bool done = false;
};

template <typename T>
struct Batch {
  std::vector<Tensor<T>> obs;       // per agent [B x obs_dim]
  std::vector<Tensor<T>> actions;   // per agent [B x act_dim]
  Tensor<T> reward;                 // [B x 1]
  std::vector<Tensor<T>> next_obs;  // per agent [B x obs_dim]
  Tensor<T> done;                   // [B x 1], 1 for terminal
  std::vector<std::size_t> indices;
};

/// Fixed-capacity FIFO ring of transitions with uniform sampling.
template <typename T>
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t agents, std::size_t obs_dim, std::size_t act_dim);

  void push(const Transition<T>& t);
  /// `batch` distinct indices drawn uniformly from [0, size()). Throws
  /// nd::ContractError when size() < batch.
  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const;
  Batch<T> sample(std::size_t batch, std::mt19937_64& rng) const;
  Batch<T> gather(const std::vector<std::size_t>& indices) const;
  /// Index 0 is the oldest stored transition.
  Transition<T> at(std::size_t index) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t agents() const { return agents_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }

 private:
  std::size_t slot(std::size_t index) const;

  std::size_t capacity_;
  std::size_t agents_;
  std::size_t obs_dim_;
  std::size_t act_dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<T> obs_;
  std::vector<T> actions_;
  std::vector<T> reward_;
  std::vector<T> next_obs_;
  std::vector<T> done_;
};

extern template class ReplayBuffer<float>;
extern template class ReplayBuffer<double>;

}  // namespace samarl::algo
