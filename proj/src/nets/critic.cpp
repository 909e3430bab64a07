#include "samarl/nets/critic.hpp"

#include "samarl/ndmath/ops.hpp"

namespace samarl::nets {

using nd::ContractError;

template <typename T>
Tensor<T> total_q(const Tensor<T>& q) {
  if (q.rank() != 2 || q.dim(1) == 0) {
    throw ContractError("total_q expects [B x n] with n >= 1, got " + nd::shape_string(q.shape()));
  }
  return nd::sum_cols(q);
}

template <typename T>
Tensor<T> double_min(const Tensor<T>& q1, const Tensor<T>& q2) {
  return nd::minimum(q1, q2);
}

template <typename T>
DoubleCritic<T>::DoubleCritic(std::unique_ptr<Critic<T>> first, std::unique_ptr<Critic<T>> second)
    : first_(std::move(first)), second_(std::move(second)) {
  if (!first_ || !second_) throw ContractError("double critic needs two critics");
  const auto a = first_->named_parameters();
  const auto b = second_->named_parameters();
  for (const auto& pa : a)
    for (const auto& pb : b)
      if (pa.tensor.node() == pb.tensor.node()) throw ContractError("double critic members share " + pa.name);
}

template <typename T>
DoubleCritic<T>::DoubleCritic(const DoubleCritic& other)
    : first_(other.first_->clone()), second_(other.second_->clone()) {}

template <typename T>
Tensor<T> DoubleCritic<T>::min_forward(const std::vector<Tensor<T>>& obs, const std::vector<Tensor<T>>& acts) const {
  return double_min(first_->forward(obs, acts), second_->forward(obs, acts));
}

template <typename T>
void DoubleCritic<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  first_->collect(prefix + "q1.", out);
  second_->collect(prefix + "q2.", out);
}

template Tensor<float> total_q(const Tensor<float>&);
template Tensor<double> total_q(const Tensor<double>&);
template Tensor<float> double_min(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> double_min(const Tensor<double>&, const Tensor<double>&);
template class DoubleCritic<float>;
template class DoubleCritic<double>;

}  // namespace samarl::nets
