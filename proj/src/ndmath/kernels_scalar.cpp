#include <cmath>

#include "samarl/ndmath/kernels.hpp"

namespace samarl::nd::kernels {

namespace {

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

template <typename T>
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
double sum_squares(std::size_t n, const T* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  return acc;
}

template <typename T>
void adam_update(std::size_t n, T* param, const T* grad, T* m, T* v, const AdamCoefficients<T>& c) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (T(1) - c.beta1) * grad[i];
    v[i] = c.beta2 * v[i] + (T(1) - c.beta2) * grad[i] * grad[i];
    const T m_hat = m[i] / c.bias_correction1;
    const T v_hat = v[i] / c.bias_correction2;
    param[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

template <typename T>
void leaky_relu(std::size_t n, const T* x, T* y, T slope) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] >= T(0) ? x[i] : slope * x[i];
}

template <typename T>
constexpr KernelTable<T> make_table() {
  return KernelTable<T>{Isa::scalar,   &gemm_nn<T>,     &gemm_nt<T>,    &gemm_tn<T>,
                        &axpy<T>,      &sum_squares<T>, &adam_update<T>, &leaky_relu<T>};
}

constexpr KernelTable<float> kScalarF = make_table<float>();
constexpr KernelTable<double> kScalarD = make_table<double>();

}  // namespace

template <>
const KernelTable<float>& scalar_kernels<float>() {
  return kScalarF;
}
template <>
const KernelTable<double>& scalar_kernels<double>() {
  return kScalarD;
}

}  // namespace samarl::nd::kernels
