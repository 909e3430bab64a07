#include "samarl/nets/attention.hpp"

#include <cmath>

#include "samarl/ndmath/ops.hpp"

namespace samarl::nets {

using nd::ContractError;

namespace {

void check_config(const AttentionConfig& cfg) {
  if (cfg.heads == 0 || cfg.key_dim == 0 || cfg.value_dim == 0 || cfg.model_dim == 0) {
    throw ContractError("attention config: heads, key_dim, value_dim and model_dim must be positive");
  }
}

template <typename T>
std::vector<SelfAttentionBlock<T>> make_blocks(const AttentionConfig& cfg, std::mt19937_64& rng) {
  std::vector<SelfAttentionBlock<T>> blocks;
  for (std::size_t b = 0; b < cfg.blocks; ++b) blocks.emplace_back(cfg.model_dim, cfg.model_dim, cfg, rng);
  return blocks;
}

template <typename T>
void collect_blocks(const std::vector<SelfAttentionBlock<T>>& blocks, const std::string& prefix,
                    std::vector<NamedTensor<T>>& out) {
  for (std::size_t b = 0; b < blocks.size(); ++b)
    blocks[b].collect(prefix + "blocks." + std::to_string(b) + ".", out);
}

}  // namespace

template <typename T>
SelfAttentionBlock<T>::SelfAttentionBlock(std::size_t in_dim, std::size_t out_dim, const AttentionConfig& cfg,
                                          std::mt19937_64& rng)
    : heads_(cfg.heads), residual_(cfg.residual), layer_norm_(cfg.layer_norm) {
  check_config(cfg);
  if (residual_ && in_dim != out_dim) {
    throw ContractError("attention block: residual connection needs in_dim == out_dim (" + std::to_string(in_dim) +
                        " vs " + std::to_string(out_dim) + ")");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  w_query_ = Param<T>(uniform_tensor<T>({in_dim, cfg.heads * cfg.key_dim}, bound, rng));
  w_key_ = Param<T>(uniform_tensor<T>({in_dim, cfg.heads * cfg.key_dim}, bound, rng));
  w_value_ = Param<T>(uniform_tensor<T>({in_dim, cfg.heads * cfg.value_dim}, bound, rng));
  out_ = Linear<T>(cfg.heads * cfg.value_dim, out_dim, rng);
  if (layer_norm_) {
    gain_ = Param<T>(Tensor<T>::full({out_dim}, T(1), true));
    beta_ = Param<T>(Tensor<T>::zeros({out_dim}, true));
  }
}

template <typename T>
Tensor<T> SelfAttentionBlock<T>::attend(const Tensor<T>& x, std::size_t agents) const {
  if (x.rank() != 2 || x.dim(1) != in_dim() || agents == 0 || x.dim(0) % agents != 0) {
    throw ContractError("attention block expects [(B*" + std::to_string(agents) + ") x " + std::to_string(in_dim()) +
                        "], got " + nd::shape_string(x.shape()));
  }
  const auto q = nd::split_heads(nd::matmul(x, w_query_.get()), agents, heads_);
  const auto k = nd::split_heads(nd::matmul(x, w_key_.get()), agents, heads_);
  const auto v = nd::split_heads(nd::matmul(x, w_value_.get()), agents, heads_);
  const auto weights = nd::softmax(nd::bmm_nt(q, k), 2);
  return nd::merge_heads(nd::bmm(weights, v), heads_);
}

template <typename T>
Tensor<T> SelfAttentionBlock<T>::forward(const Tensor<T>& x, std::size_t agents) const {
  auto y = out_.forward(attend(x, agents));
  if (residual_) y = nd::add(y, x);
  if (layer_norm_) y = nd::layer_norm(y, gain_.get(), beta_.get());
  return y;
}

template <typename T>
void SelfAttentionBlock<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  out.push_back({prefix + "w_query", w_query_.get()});
  out.push_back({prefix + "w_key", w_key_.get()});
  out.push_back({prefix + "w_value", w_value_.get()});
  out_.collect(prefix + "w_out.", out);
  if (layer_norm_) {
    out.push_back({prefix + "norm.gain", gain_.get()});
    out.push_back({prefix + "norm.bias", beta_.get()});
  }
}

template <typename T>
AttentionCritic<T>::AttentionCritic(std::size_t obs_dim, std::size_t act_dim, std::size_t agents,
                                    const AttentionConfig& cfg, std::mt19937_64& rng)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      agents_(agents),
      embed_(obs_dim + act_dim, cfg.model_dim, rng),
      blocks_(make_blocks<T>(cfg, rng)),
      head_(cfg.model_dim, 1, MlpShape{cfg.head_hidden, 1}, rng) {
  if (agents == 0) throw ContractError("attention critic needs at least one agent");
}

template <typename T>
Tensor<T> AttentionCritic<T>::forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const {
  if (obs.size() != agents_ || acts.size() != agents_) {
    throw ContractError("attention critic built for " + std::to_string(agents_) + " agents, got " +
                        std::to_string(obs.size()) + " observations and " + std::to_string(acts.size()) + " actions");
  }
  const auto stacked = nd::concat_cols<T>({nd::stack_agents(obs), nd::stack_agents(acts)});
  if (stacked.dim(1) != obs_dim_ + act_dim_) {
    throw ContractError("attention critic expects per-agent input width " + std::to_string(obs_dim_ + act_dim_) +
                        ", got " + std::to_string(stacked.dim(1)));
  }
  auto h = nd::leaky_relu(embed_.forward(stacked));
  for (const auto& block : blocks_) h = block.forward(h, agents_);
  const auto q = head_.forward(h);
  return nd::reshape(q, {q.dim(0) / agents_, agents_});
}

template <typename T>
void AttentionCritic<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  embed_.collect(prefix + "embed.", out);
  collect_blocks(blocks_, prefix, out);
  head_.collect(prefix + "head.", out);
}

template <typename T>
AttentionActor<T>::AttentionActor(std::size_t obs_dim, std::size_t act_dim, const AttentionConfig& cfg,
                                  std::mt19937_64& rng)
    : embed_(obs_dim, cfg.model_dim, rng),
      blocks_(make_blocks<T>(cfg, rng)),
      head_(cfg.model_dim, act_dim, MlpShape{cfg.head_hidden, 1}, rng) {}

template <typename T>
std::vector<Tensor<T>> AttentionActor<T>::forward(const std::vector<Tensor<T>>& obs) const {
  if (obs.empty()) throw ContractError("attention actor: no observations");
  for (const auto& o : obs) {
    if (o.rank() != 2 || o.dim(1) != obs_dim()) {
      throw ContractError("attention actor expects observations [B x " + std::to_string(obs_dim()) + "], got " +
                          nd::shape_string(o.shape()));
    }
  }
  const std::size_t n = obs.size();
  auto h = nd::leaky_relu(embed_.forward(nd::stack_agents(obs)));
  for (const auto& block : blocks_) h = block.forward(h, n);
  const auto actions = nd::tanh(head_.forward(h));
  std::vector<Tensor<T>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(nd::agent_rows(actions, n, i));
  return out;
}

template <typename T>
void AttentionActor<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  embed_.collect(prefix + "embed.", out);
  collect_blocks(blocks_, prefix, out);
  head_.collect(prefix + "head.", out);
}

template class SelfAttentionBlock<float>;
template class SelfAttentionBlock<double>;
template class AttentionCritic<float>;
template class AttentionCritic<double>;
template class AttentionActor<float>;
template class AttentionActor<double>;

}  // namespace samarl::nets
