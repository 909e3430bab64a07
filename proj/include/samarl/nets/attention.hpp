#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "samarl/nets/mlp.hpp"
#include "samarl/nets/module.hpp"

namespace samarl::nets {

struct AttentionConfig {
  std::size_t model_dim = 64;
  std::size_t heads = 4;
  std::size_t key_dim = 16;
  std::size_t value_dim = 64;
  std::size_t blocks = 2;
  std::size_t head_hidden = 64;
  bool residual = true;
  bool layer_norm = true;
};

/// Multi-head unscaled dot-product self-attention over the agent axis.
/// Rows are laid out agent-minor: row b*n + i is agent i of batch element b.
/// Per head h: softmax(X Wq_h (X Wk_h)^T) X Wv_h; heads are concatenated and
/// projected by W_out. No positional information enters anywhere.
template <typename T>
class SelfAttentionBlock : public Module<T> {
 public:
  SelfAttentionBlock(std::size_t in_dim, std::size_t out_dim, const AttentionConfig& cfg, std::mt19937_64& rng);

  /// x: [(B*n) x in_dim] -> [(B*n) x out_dim]
  Tensor<T> forward(const Tensor<T>& x, std::size_t agents) const;
  /// Head-concatenated attention output before W_out, [(B*n) x (heads*value_dim)].
  Tensor<T> attend(const Tensor<T>& x, std::size_t agents) const;

  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

  std::size_t in_dim() const { return w_query_.get().dim(0); }
  std::size_t out_dim() const { return out_.out_features(); }
  std::size_t heads() const { return heads_; }

  Tensor<T>& w_query() { return w_query_.get(); }
  Tensor<T>& w_key() { return w_key_.get(); }
  Tensor<T>& w_value() { return w_value_.get(); }
  Linear<T>& w_out() { return out_; }
  Tensor<T>& norm_gain() { return gain_.get(); }
  Tensor<T>& norm_bias() { return beta_.get(); }

 private:
  std::size_t heads_;
  bool residual_;
  bool layer_norm_;
  Param<T> w_query_;
  Param<T> w_key_;
  Param<T> w_value_;
  Linear<T> out_;
  Param<T> gain_;
  Param<T> beta_;
};

/// Shared critic for n same-type agents: embed concat(o_i, a_i), attend, then a
/// position-wise Q head. Returns [B x n].
template <typename T>
class AttentionCritic : public Critic<T> {
 public:
  AttentionCritic(std::size_t obs_dim, std::size_t act_dim, std::size_t agents, const AttentionConfig& cfg,
                  std::mt19937_64& rng);

  Tensor<T> forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const override;
  std::size_t outputs() const override { return agents_; }
  std::unique_ptr<Critic<T>> clone() const override { return std::make_unique<AttentionCritic>(*this); }
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

  std::vector<SelfAttentionBlock<T>>& blocks() { return blocks_; }

 private:
  std::size_t obs_dim_;
  std::size_t act_dim_;
  std::size_t agents_;
  Linear<T> embed_;
  std::vector<SelfAttentionBlock<T>> blocks_;
  MlpBody<T> head_;
};

/// Centralized policy: all observations -> all tanh-bounded actions, one shared network.
template <typename T>
class AttentionActor : public JointActor<T> {
 public:
  AttentionActor(std::size_t obs_dim, std::size_t act_dim, const AttentionConfig& cfg, std::mt19937_64& rng);

  std::vector<Tensor<T>> forward(const std::vector<Tensor<T>>& obs) const override;
  std::size_t obs_dim() const override { return embed_.in_features(); }
  std::size_t act_dim() const override { return head_.out_features(); }
  std::unique_ptr<JointActor<T>> clone() const override { return std::make_unique<AttentionActor>(*this); }
  void collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const override;

 private:
  Linear<T> embed_;
  std::vector<SelfAttentionBlock<T>> blocks_;
  MlpBody<T> head_;
};

extern template class SelfAttentionBlock<float>;
extern template class SelfAttentionBlock<double>;
extern template class AttentionCritic<float>;
extern template class AttentionCritic<double>;
extern template class AttentionActor<float>;
extern template class AttentionActor<double>;

}  // namespace samarl::nets
