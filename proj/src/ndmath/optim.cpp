#include "samarl/ndmath/optim.hpp"

#include <cmath>
#include <sstream>

#include "samarl/ndmath/kernels.hpp"

namespace samarl::nd {

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamOptions<T> options)
    : params_(std::move(params)), options_(options) {
  if (!(options_.lr > T(0))) throw ContractError("Adam: learning rate must be positive");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), T(0));
    v_.emplace_back(p.size(), T(0));
  }
}

template <typename T>
void Adam<T>::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) continue;
    const auto g = params_[i].grad();
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!std::isfinite(g[j])) {
        std::ostringstream msg;
        msg << "Adam step aborted: non-finite gradient " << g[j] << " at parameter " << i << " (shape "
            << shape_string(params_[i].shape()) << "), element " << j << ", after " << t_ << " steps";
        throw NumericError(msg.str());
      }
    }
  }
  ++t_;
  const double td = static_cast<double>(t_);
  kernels::AdamCoefficients<T> c{options_.lr,
                                 options_.beta1,
                                 options_.beta2,
                                 options_.eps,
                                 static_cast<T>(1.0 - std::pow(static_cast<double>(options_.beta1), td)),
                                 static_cast<T>(1.0 - std::pow(static_cast<double>(options_.beta2), td))};
  const auto& kt = kernels::active<T>();
  std::vector<T> zeros;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    const T* g = nullptr;
    if (p.has_grad()) {
      g = p.grad().data();
    } else {
      zeros.assign(p.size(), T(0));
      g = zeros.data();
    }
    kt.adam_update(p.size(), p.mutable_data().data(), g, m_[i].data(), v_[i].data(), c);
  }
}

template <typename T>
double grad_norm(std::span<const Tensor<T>> params) {
  const auto& kt = kernels::active<T>();
  double total = 0.0;
  for (const auto& p : params) {
    if (p.has_grad()) total += kt.sum_squares(p.size(), p.grad().data());
  }
  return std::sqrt(total);
}

template <typename T>
double clip_grad_norm(std::span<Tensor<T>> params, double max_norm) {
  if (!(max_norm > 0.0)) throw ContractError("clip_grad_norm: max_norm must be positive");
  const double norm = grad_norm<T>(std::span<const Tensor<T>>(params.data(), params.size()));
  if (norm > max_norm) {
    const T factor = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      if (!p.has_grad()) continue;
      for (auto& g : p.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

template class Adam<float>;
template class Adam<double>;
template double grad_norm<float>(std::span<const Tensor<float>>);
template double grad_norm<double>(std::span<const Tensor<double>>);
template double clip_grad_norm<float>(std::span<Tensor<float>>, double);
template double clip_grad_norm<double>(std::span<Tensor<double>>, double);

}  // namespace samarl::nd
