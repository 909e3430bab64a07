#include "samarl/nets/module.hpp"

#include <cmath>

#include "samarl/ndmath/ops.hpp"

namespace samarl::nets {

using nd::ContractError;

template <typename T>
std::vector<NamedTensor<T>> Module<T>::named_parameters(const std::string& prefix) const {
  std::vector<NamedTensor<T>> out;
  collect(prefix, out);
  return out;
}

template <typename T>
std::vector<Tensor<T>> Module<T>::parameters() const {
  std::vector<Tensor<T>> out;
  for (auto& p : named_parameters()) out.push_back(p.tensor);
  return out;
}

template <typename T>
std::size_t Module<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : named_parameters()) n += p.tensor.size();
  return n;
}

template <typename T>
void Module<T>::set_requires_grad(bool flag) {
  for (auto& p : named_parameters()) p.tensor.set_requires_grad(flag);
}

template <typename T>
void Module<T>::zero_grad() {
  for (auto& p : named_parameters()) p.tensor.zero_grad();
}

namespace {

template <typename T>
void check_layouts(const std::vector<NamedTensor<T>>& a, const std::vector<NamedTensor<T>>& b,
                   const char* what) {
  if (a.size() != b.size()) {
    throw ContractError(std::string(what) + ": parameter count " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tensor.shape() != b[i].tensor.shape()) {
      throw ContractError(std::string(what) + ": shape mismatch at " + a[i].name + " " +
                          nd::shape_string(a[i].tensor.shape()) + " vs " + b[i].name + " " +
                          nd::shape_string(b[i].tensor.shape()));
    }
  }
}

}  // namespace

template <typename T>
void Module<T>::copy_from(const Module& other) {
  auto dst = named_parameters();
  const auto src = other.named_parameters();
  check_layouts(dst, src, "copy_from");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i].tensor.mutable_data();
    const auto s = src[i].tensor.data();
    std::copy(s.begin(), s.end(), d.begin());
  }
}

template <typename T>
void soft_update(Module<T>& target, const Module<T>& main, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("soft_update: tau must lie in (0, 1]");
  auto dst = target.named_parameters();
  const auto src = main.named_parameters();
  check_layouts(dst, src, "soft_update");
  const T a = static_cast<T>(tau);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i].tensor.mutable_data();
    const auto s = src[i].tensor.data();
    if (tau == 1.0) {
      std::copy(s.begin(), s.end(), d.begin());
    } else {
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += a * (s[j] - d[j]);
    }
  }
}

template <typename T>
Tensor<T> uniform_tensor(nd::Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> values(nd::numel(shape));
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(values), true);
}

template <typename T>
Linear<T>::Linear(std::size_t in, std::size_t out, std::mt19937_64& rng, bool bias) {
  if (in == 0 || out == 0) throw ContractError("Linear: zero-sized layer");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = Param<T>(uniform_tensor<T>({in, out}, bound, rng));
  if (bias) bias_ = Param<T>(uniform_tensor<T>({out}, bound, rng));
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) const {
  return nd::linear(x, weight_.get(), bias_.get());
}

template <typename T>
void Linear<T>::collect(const std::string& prefix, std::vector<NamedTensor<T>>& out) const {
  out.push_back({prefix + "weight", weight_.get()});
  if (bias_.get().defined()) out.push_back({prefix + "bias", bias_.get()});
}

template class Module<float>;
template class Module<double>;
template class Linear<float>;
template class Linear<double>;
template void soft_update(Module<float>&, const Module<float>&, double);
template void soft_update(Module<double>&, const Module<double>&, double);
template Tensor<float> uniform_tensor<float>(nd::Shape, double, std::mt19937_64&);
template Tensor<double> uniform_tensor<double>(nd::Shape, double, std::mt19937_64&);

}  // namespace samarl::nets
