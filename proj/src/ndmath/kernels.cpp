#include <atomic>
#include <cstdlib>
#include <string>

#include "samarl/ndmath/kernels.hpp"

namespace samarl::nd::kernels {

#if defined(SAMARL_HAVE_AVX2_KERNELS)
namespace detail {
const KernelTable<float>* compiled_avx2_float();
const KernelTable<double>* compiled_avx2_double();
}  // namespace detail
#endif

namespace {

bool detect_avx2() {
#if defined(SAMARL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_avx2() {
  static const bool supported = detect_avx2();
  return supported;
}

Isa initial_isa() {
  if (const char* forced = std::getenv("SAMARL_KERNELS")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

template <>
const KernelTable<float>* avx2_kernels<float>() {
#if defined(SAMARL_HAVE_AVX2_KERNELS)
  if (cpu_has_avx2()) return detail::compiled_avx2_float();
#endif
  return nullptr;
}

template <>
const KernelTable<double>* avx2_kernels<double>() {
#if defined(SAMARL_HAVE_AVX2_KERNELS)
  if (cpu_has_avx2()) return detail::compiled_avx2_double();
#endif
  return nullptr;
}

template <typename T>
const KernelTable<T>& active() {
  if (selected().load(std::memory_order_relaxed) == Isa::avx2) {
    if (const auto* table = avx2_kernels<T>()) return *table;
  }
  return scalar_kernels<T>();
}

template const KernelTable<float>& active<float>();
template const KernelTable<double>& active<double>();

Isa active_isa() { return selected().load(); }

bool select_isa(Isa isa) {
  if (isa == Isa::avx2 && avx2_kernels<float>() == nullptr) return false;
  selected().store(isa);
  return true;
}

}  // namespace samarl::nd::kernels
