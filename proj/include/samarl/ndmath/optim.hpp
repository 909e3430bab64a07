#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::nd {

template <typename T>
struct AdamOptions {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

/// Adam with bias correction. Holds first/second moments mirroring the
/// parameter set it was constructed with. A parameter without a gradient
/// buffer is treated as having a zero gradient.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamOptions<T> options);

  /// One update. Throws NumericError, leaving every parameter and moment
  /// untouched, when any gradient entry is non-finite.
  void step();

  std::uint64_t steps() const { return t_; }
  const AdamOptions<T>& options() const { return options_; }
  void set_learning_rate(T lr) { options_.lr = lr; }
  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }

 private:
  std::vector<Tensor<T>> params_;
  AdamOptions<T> options_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::uint64_t t_ = 0;
};

/// Global L2 norm over the gradients of `params` (missing gradients count as zero).
template <typename T>
double grad_norm(std::span<const Tensor<T>> params);

/// Rescales all gradients by max_norm / norm when the global norm exceeds
/// max_norm. Returns the norm measured before clipping.
template <typename T>
double clip_grad_norm(std::span<Tensor<T>> params, double max_norm);

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace samarl::nd
