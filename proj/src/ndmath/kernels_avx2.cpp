// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// is only entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "samarl/ndmath/kernels.hpp"

namespace samarl::nd::kernels {

namespace {

template <typename T>
struct Lanes;

template <>
struct Lanes<float> {
  using Reg = __m256;
  static constexpr std::size_t width = 8;
  static Reg zero() { return _mm256_setzero_ps(); }
  static Reg load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, Reg r) { _mm256_storeu_ps(p, r); }
  static Reg set1(float v) { return _mm256_set1_ps(v); }
  static Reg fmadd(Reg a, Reg b, Reg c) { return _mm256_fmadd_ps(a, b, c); }
  static Reg add(Reg a, Reg b) { return _mm256_add_ps(a, b); }
  static Reg sub(Reg a, Reg b) { return _mm256_sub_ps(a, b); }
  static Reg mul(Reg a, Reg b) { return _mm256_mul_ps(a, b); }
  static Reg div(Reg a, Reg b) { return _mm256_div_ps(a, b); }
  static Reg sqrt(Reg a) { return _mm256_sqrt_ps(a); }
  static Reg max(Reg a, Reg b) { return _mm256_max_ps(a, b); }
  static Reg min(Reg a, Reg b) { return _mm256_min_ps(a, b); }
};

template <>
struct Lanes<double> {
  using Reg = __m256d;
  static constexpr std::size_t width = 4;
  static Reg zero() { return _mm256_setzero_pd(); }
  static Reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, Reg r) { _mm256_storeu_pd(p, r); }
  static Reg set1(double v) { return _mm256_set1_pd(v); }
  static Reg fmadd(Reg a, Reg b, Reg c) { return _mm256_fmadd_pd(a, b, c); }
  static Reg add(Reg a, Reg b) { return _mm256_add_pd(a, b); }
  static Reg sub(Reg a, Reg b) { return _mm256_sub_pd(a, b); }
  static Reg mul(Reg a, Reg b) { return _mm256_mul_pd(a, b); }
  static Reg div(Reg a, Reg b) { return _mm256_div_pd(a, b); }
  static Reg sqrt(Reg a) { return _mm256_sqrt_pd(a); }
  static Reg max(Reg a, Reg b) { return _mm256_max_pd(a, b); }
  static Reg min(Reg a, Reg b) { return _mm256_min_pd(a, b); }
};

// Register tile of MR rows x NV vectors. B rows stream through L1 while the
// accumulators stay in registers for the whole k loop.
template <typename T, std::size_t MR, std::size_t NV>
inline void tile(std::size_t n, std::size_t k, const T* a, const T* b, T* c, bool accumulate) {
  using L = Lanes<T>;
  typename L::Reg acc[MR][NV];
#pragma GCC unroll 8
  for (std::size_t r = 0; r < MR; ++r)
#pragma GCC unroll 8
    for (std::size_t v = 0; v < NV; ++v) acc[r][v] = L::zero();

  for (std::size_t p = 0; p < k; ++p) {
    typename L::Reg bv[NV];
#pragma GCC unroll 8
    for (std::size_t v = 0; v < NV; ++v) bv[v] = L::load(b + p * n + v * L::width);
#pragma GCC unroll 8
    for (std::size_t r = 0; r < MR; ++r) {
      const auto av = L::set1(a[r * k + p]);
#pragma GCC unroll 8
      for (std::size_t v = 0; v < NV; ++v) acc[r][v] = L::fmadd(av, bv[v], acc[r][v]);
    }
  }

#pragma GCC unroll 8
  for (std::size_t r = 0; r < MR; ++r)
#pragma GCC unroll 8
    for (std::size_t v = 0; v < NV; ++v) {
      T* dst = c + r * n + v * L::width;
      L::store(dst, accumulate ? L::add(L::load(dst), acc[r][v]) : acc[r][v]);
    }
}

template <typename T, std::size_t MR>
inline void row_block(std::size_t n, std::size_t k, const T* a, const T* b, T* c, bool accumulate) {
  constexpr std::size_t W = Lanes<T>::width;
  std::size_t j = 0;
  for (; j + 2 * W <= n; j += 2 * W) tile<T, MR, 2>(n, k, a, b + j, c + j, accumulate);
  for (; j + W <= n; j += W) tile<T, MR, 1>(n, k, a, b + j, c + j, accumulate);
  for (; j < n; ++j) {
    for (std::size_t r = 0; r < MR; ++r) {
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += a[r * k + p] * b[p * n + j];
      T& dst = c[r * n + j];
      dst = accumulate ? dst + acc : acc;
    }
  }
}

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) row_block<T, 4>(n, k, a + i * k, b, c + i * n, accumulate);
  for (; i < m; ++i) row_block<T, 1>(n, k, a + i * k, b, c + i * n, accumulate);
}

template <typename T>
void transpose_into(std::size_t rows, std::size_t cols, const T* src, std::vector<T>& dst) {
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
}

template <typename T>
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  thread_local std::vector<T> packed;
  transpose_into(n, k, b, packed);  // [n x k] -> [k x n]
  gemm_nn(m, n, k, a, packed.data(), c, accumulate);
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  thread_local std::vector<T> packed;
  transpose_into(k, m, a, packed);  // [k x m] -> [m x k]
  gemm_nn(m, n, k, packed.data(), b, c, accumulate);
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  using L = Lanes<T>;
  const auto va = L::set1(alpha);
  std::size_t i = 0;
  for (; i + L::width <= n; i += L::width) L::store(y + i, L::fmadd(va, L::load(x + i), L::load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_f(std::size_t n, const float* x) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256d a = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    const __m256d b = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    lo = _mm256_fmadd_pd(a, a, lo);
    hi = _mm256_fmadd_pd(b, b, hi);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(lo, hi));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  return acc;
}

double sum_squares_d(std::size_t n, const double* x) {
  __m256d acc4 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    acc4 = _mm256_fmadd_pd(a, a, acc4);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc4);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

template <typename T>
void adam_update(std::size_t n, T* param, const T* grad, T* m, T* v, const AdamCoefficients<T>& c) {
  using L = Lanes<T>;
  const auto b1 = L::set1(c.beta1), b2 = L::set1(c.beta2);
  const auto one_b1 = L::set1(T(1) - c.beta1), one_b2 = L::set1(T(1) - c.beta2);
  const auto bc1 = L::set1(c.bias_correction1), bc2 = L::set1(c.bias_correction2);
  const auto lr = L::set1(c.lr), eps = L::set1(c.eps);
  std::size_t i = 0;
  for (; i + L::width <= n; i += L::width) {
    const auto g = L::load(grad + i);
    const auto mi = L::add(L::mul(b1, L::load(m + i)), L::mul(one_b1, g));
    const auto vi = L::add(L::mul(b2, L::load(v + i)), L::mul(L::mul(one_b2, g), g));
    L::store(m + i, mi);
    L::store(v + i, vi);
    const auto m_hat = L::div(mi, bc1);
    const auto v_hat = L::div(vi, bc2);
    const auto step = L::div(L::mul(lr, m_hat), L::add(L::sqrt(v_hat), eps));
    L::store(param + i, L::sub(L::load(param + i), step));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (T(1) - c.beta1) * grad[i];
    v[i] = c.beta2 * v[i] + (T(1) - c.beta2) * grad[i] * grad[i];
    const T m_hat = m[i] / c.bias_correction1;
    const T v_hat = v[i] / c.bias_correction2;
    param[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

template <typename T>
void leaky_relu(std::size_t n, const T* x, T* y, T slope) {
  using L = Lanes<T>;
  const auto zero = L::zero();
  const auto s = L::set1(slope);
  std::size_t i = 0;
  for (; i + L::width <= n; i += L::width) {
    const auto xv = L::load(x + i);
    L::store(y + i, L::fmadd(s, L::min(xv, zero), L::max(xv, zero)));
  }
  for (; i < n; ++i) y[i] = x[i] >= T(0) ? x[i] : slope * x[i];
}

const KernelTable<float> kAvx2F{Isa::avx2,     &gemm_nn<float>,     &gemm_nt<float>,
                                &gemm_tn<float>, &axpy<float>,      &sum_squares_f,
                                &adam_update<float>, &leaky_relu<float>};
const KernelTable<double> kAvx2D{Isa::avx2,      &gemm_nn<double>,     &gemm_nt<double>,
                                 &gemm_tn<double>, &axpy<double>,      &sum_squares_d,
                                 &adam_update<double>, &leaky_relu<double>};

}  // namespace

namespace detail {
const KernelTable<float>* compiled_avx2_float() { return &kAvx2F; }
const KernelTable<double>* compiled_avx2_double() { return &kAvx2D; }
}  // namespace detail

}  // namespace samarl::nd::kernels
