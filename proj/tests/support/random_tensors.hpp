#pragma once

#include <random>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::testing {

template <typename T>
nd::Tensor<T> random_tensor(nd::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0,
                            bool requires_grad = false) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> values(nd::numel(shape));
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return nd::Tensor<T>(std::move(shape), std::move(values), requires_grad);
}

template <typename T>
std::vector<T> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> values(n);
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return values;
}

}  // namespace samarl::testing
