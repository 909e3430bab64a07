#pragma once

#include <memory>
#include <vector>

#include "samarl/nets/module.hpp"

namespace samarl::nets {

/// Per-agent Q values [B x n] -> summed total [B x 1].
template <typename T>
Tensor<T> total_q(const Tensor<T>& q);

/// Elementwise minimum of two critics' outputs.
template <typename T>
Tensor<T> double_min(const Tensor<T>& q1, const Tensor<T>& q2);

/// Two independently initialized critics of the same architecture.
template <typename T>
class DoubleCritic : public Module<T> {
 public:
  DoubleCritic(std::unique_ptr<Critic<T>> first, std::unique_ptr<Critic<T>> second);
  DoubleCritic(const DoubleCritic& other);
  DoubleCritic& operator=(const DoubleCritic&) = delete;
  DoubleCritic(DoubleCritic&&) noexcept = default;

  Critic<T>& first() { return *first_; }
  Critic<T>& second() { return *second_; }
  const Critic<T>& first() const { return *first_; }
  const Critic<T>& second() const { return *second_; }

  Tensor<T> min_forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const;
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

 private:
  std::unique_ptr<Critic<T>> first_;
  std::unique_ptr<Critic<T>> second_;
};

extern template class DoubleCritic<float>;
extern template class DoubleCritic<double>;

}  // namespace samarl::nets
