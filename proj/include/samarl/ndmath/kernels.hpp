#pragma once

// Data-parallel inner loops behind the tensor ops. Every kernel has a scalar
// reference implementation; SIMD variants are selected once at startup from
// the host CPU and must agree with the reference to rounding.
//
// All matrices are dense row-major. Each output element of a GEMM is
// accumulated over the inner index in increasing order, whichever variant
// runs, so results are reproducible on a given host.

#include <cstddef>
#include <string_view>

namespace samarl::nd::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

template <typename T>
struct AdamCoefficients {
  T lr;
  T beta1;
  T beta2;
  T eps;
  T bias_correction1;  // 1 - beta1^t
  T bias_correction2;  // 1 - beta2^t
};

template <typename T>
struct KernelTable {
  Isa isa;
  /// C[m x n] (+)= A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
                  bool accumulate);
  /// C[m x n] (+)= A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
                  bool accumulate);
  /// C[m x n] (+)= A[k x m]^T * B[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
                  bool accumulate);
  /// y += alpha * x
  void (*axpy)(std::size_t n, T alpha, const T* x, T* y);
  /// sum of x[i]^2, accumulated in double
  double (*sum_squares)(std::size_t n, const T* x);
  void (*adam_update)(std::size_t n, T* param, const T* grad, T* m, T* v,
                      const AdamCoefficients<T>& c);
  /// y = x >= 0 ? x : slope * x
  void (*leaky_relu)(std::size_t n, const T* x, T* y, T slope);
};

template <typename T>
const KernelTable<T>& scalar_kernels();

/// Null when the variant was not compiled in or the CPU lacks the instructions.
template <typename T>
const KernelTable<T>* avx2_kernels();

/// Kernels used by the tensor ops. Defaults to the widest supported ISA;
/// the environment variable SAMARL_KERNELS=scalar forces the reference path.
template <typename T>
const KernelTable<T>& active();

Isa active_isa();
/// Overrides the selection (tests, benchmarking). Returns false when unavailable.
bool select_isa(Isa isa);

}  // namespace samarl::nd::kernels
