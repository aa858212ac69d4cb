#include <cstdlib>
#include <string>

#include "sparsecl/simd/kernels.hpp"

namespace sparsecl::simd {

#if defined(SPARSECL_HAVE_AVX2)
const KernelTable& avx2_kernel_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(SPARSECL_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* resolve(std::string_view which) noexcept {
  if (which == "scalar") return &scalar_kernels();
  if (which == "avx2") return avx2_kernels();
  if (which.empty() || which == "auto") {
    const KernelTable* best = avx2_kernels();
    return best ? best : &scalar_kernels();
  }
  return nullptr;
}

const KernelTable*& current() noexcept {
  static const KernelTable* table = [] {
    const char* env = std::getenv("SPARSECL_SIMD");
    const KernelTable* t = resolve(env ? std::string_view(env) : std::string_view());
    return t ? t : resolve("auto");
  }();
  return table;
}

}  // namespace

const KernelTable& active_kernels() noexcept { return *current(); }

bool select_kernels(std::string_view which) noexcept {
  const KernelTable* t = resolve(which);
  if (!t) return false;
  current() = t;
  return true;
}

}  // namespace sparsecl::simd
