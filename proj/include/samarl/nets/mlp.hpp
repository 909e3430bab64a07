#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "samarl/nets/module.hpp"

namespace samarl::nets {

struct MlpShape {
  std::size_t hidden = 64;
  std::size_t layers = 3;
};

/// Stack of leaky-relu hidden layers followed by a linear output layer.
template <typename T>
class MlpBody : public Module<T> {
 public:
  MlpBody() = default;
  MlpBody(std::size_t in, std::size_t out, MlpShape shape, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x) const;
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

  std::size_t in_features() const { return layers_.front().in_features(); }
  std::size_t out_features() const { return layers_.back().out_features(); }

 private:
  std::vector<Linear<T>> layers_;
};

/// obs [B x obs_dim] -> tanh-bounded actions [B x act_dim].
template <typename T>
class MlpActor : public Actor<T> {
 public:
  MlpActor(std::size_t obs_dim, std::size_t act_dim, MlpShape shape, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& obs) const override;
  std::size_t obs_dim() const override { return body_.in_features(); }
  std::size_t act_dim() const override { return body_.out_features(); }
  std::unique_ptr<Actor<T>> clone() const override { return std::make_unique<MlpActor>(*this); }
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

 private:
  MlpBody<T> body_;
};

/// Centralized critic owned by one agent: concat(o_1..o_n, a_1..a_n) -> [B x 1].
template <typename T>
class MlpCritic : public Critic<T> {
 public:
  MlpCritic(std::size_t input_dim, MlpShape shape, std::mt19937_64& rng);

  Tensor<T> forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const override;
  std::size_t outputs() const override { return 1; }
  std::unique_ptr<Critic<T>> clone() const override { return std::make_unique<MlpCritic>(*this); }
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

 private:
  MlpBody<T> body_;
};

extern template class MlpBody<float>;
extern template class MlpBody<double>;
extern template class MlpActor<float>;
extern template class MlpActor<double>;
extern template class MlpCritic<float>;
extern template class MlpCritic<double>;

}  // namespace samarl::nets
