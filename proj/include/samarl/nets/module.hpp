#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::nets {

using nd::Tensor;

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

/// A tensor owned by a module. Copying a module deep-copies its parameters.
template <typename T>
class Param {
 public:
  Param() = default;
  explicit Param(Tensor<T> t) : tensor_(std::move(t)) {}
  Param(const Param& other) : tensor_(other.tensor_.clone()) {}
  Param& operator=(const Param& other) {
    if (this != &other) tensor_ = other.tensor_.clone();
    return *this;
  }
  Param(Param&&) noexcept = default;
  Param& operator=(Param&&) noexcept = default;

  const Tensor<T>& get() const { return tensor_; }
  Tensor<T>& get() { return tensor_; }

 private:
  Tensor<T> tensor_;
};

/// Parameter container. Names are stable and hierarchical ("blocks.0.w_query").
template <typename T>
class Module {
 public:
  virtual ~Module() = default;

  virtual void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const = 0;

  std::vector<NamedTensor<T>> named_parameters(const std::string& prefix = "") const;
  std::vector<Tensor<T>> parameters() const;
  std::size_t parameter_count() const;

  void set_requires_grad(bool flag);
  void zero_grad();
  /// Copies parameter values from a module with an identical layout.
  void copy_from(const Module& other);
};

/// target <- tau * main + (1 - tau) * target, elementwise over matching parameters.
template <typename T>
void soft_update(Module<T>& target, const Module<T>& main, double tau);

/// Uniform in [-bound, bound].
template <typename T>
Tensor<T> uniform_tensor(nd::Shape shape, double bound, std::mt19937_64& rng);

template <typename T>
class Linear : public Module<T> {
 public:
  Linear() = default;
  /// Weights and bias uniform in +-1/sqrt(in).
  Linear(std::size_t in, std::size_t out, std::mt19937_64& rng, bool bias = true);

  Tensor<T> forward(const Tensor<T>& x) const;
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

  std::size_t in_features() const { return weight_.get().dim(0); }
  std::size_t out_features() const { return weight_.get().dim(1); }
  Tensor<T>& weight() { return weight_.get(); }
  Tensor<T>& bias() { return bias_.get(); }

 private:
  Param<T> weight_;
  Param<T> bias_;
};

/// Decentralized policy: one agent's observations [B x obs] -> actions [B x act].
template <typename T>
class Actor : public Module<T> {
 public:
  virtual Tensor<T> forward(const Tensor<T>& obs) const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t act_dim() const = 0;
  virtual std::unique_ptr<Actor> clone() const = 0;
};

/// Centralized policy: every agent's observations -> every agent's actions.
template <typename T>
class JointActor : public Module<T> {
 public:
  virtual std::vector<Tensor<T>> forward(const std::vector<Tensor<T>>& obs) const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t act_dim() const = 0;
  virtual std::unique_ptr<JointActor> clone() const = 0;
};

/// Action-value network over per-agent observations and actions ([B x o_i], [B x a_i]).
/// Returns [B x outputs()]: one column per agent for a shared critic, one column
/// for a critic owned by a single agent.
template <typename T>
class Critic : public Module<T> {
 public:
  virtual Tensor<T> forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const = 0;
  virtual std::size_t outputs() const = 0;
  virtual std::unique_ptr<Critic> clone() const = 0;
};

extern template class Module<float>;
extern template class Module<double>;
extern template class Linear<float>;
extern template class Linear<double>;

}  // namespace samarl::nets
