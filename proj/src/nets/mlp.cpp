#include "samarl/nets/mlp.hpp"

#include "samarl/ndmath/ops.hpp"

namespace samarl::nets {

using nd::ContractError;

template <typename T>
MlpBody<T>::MlpBody(std::size_t in, std::size_t out, MlpShape shape, std::mt19937_64& rng) {
  std::size_t width = in;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    layers_.emplace_back(width, shape.hidden, rng);
    width = shape.hidden;
  }
  layers_.emplace_back(width, out, rng);
}

template <typename T>
Tensor<T> MlpBody<T>::forward(const Tensor<T>& x) const {
  Tensor<T> h = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) h = nd::leaky_relu(layers_[l].forward(h));
  return layers_.back().forward(h);
}

template <typename T>
void MlpBody<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  for (std::size_t l = 0; l < layers_.size(); ++l) layers_[l].collect(prefix + "l" + std::to_string(l) + ".", out);
}

template <typename T>
MlpActor<T>::MlpActor(std::size_t obs_dim, std::size_t act_dim, MlpShape shape, std::mt19937_64& rng)
    : body_(obs_dim, act_dim, shape, rng) {}

template <typename T>
Tensor<T> MlpActor<T>::forward(const Tensor<T>& obs) const {
  if (obs.rank() != 2 || obs.dim(1) != obs_dim()) {
    throw ContractError("actor expects observations [B x " + std::to_string(obs_dim()) + "], got " +
                        nd::shape_string(obs.shape()));
  }
  return nd::tanh(body_.forward(obs));
}

template <typename T>
void MlpActor<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  body_.collect(prefix, out);
}

template <typename T>
MlpCritic<T>::MlpCritic(std::size_t input_dim, MlpShape shape, std::mt19937_64& rng)
    : body_(input_dim, 1, shape, rng) {}

template <typename T>
Tensor<T> MlpCritic<T>::forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const {
  if (obs.size() != acts.size() || obs.empty()) {
    throw ContractError("critic: " + std::to_string(obs.size()) + " observation blocks vs " +
                        std::to_string(acts.size()) + " action blocks");
  }
  std::vector<Tensor<T>> parts(obs);
  parts.insert(parts.end(), acts.begin(), acts.end());
  const auto x = nd::concat_cols(parts);
  if (x.dim(1) != body_.in_features()) {
    throw ContractError("critic expects " + std::to_string(body_.in_features()) + " input columns, got " +
                        std::to_string(x.dim(1)));
  }
  return body_.forward(x);
}

template <typename T>
void MlpCritic<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  body_.collect(prefix, out);
}

template class MlpBody<float>;
template class MlpBody<double>;
template class MlpActor<float>;
template class MlpActor<double>;
template class MlpCritic<float>;
template class MlpCritic<double>;

}  // namespace samarl::nets
