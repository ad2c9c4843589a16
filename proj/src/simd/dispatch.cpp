#include <cstdlib>
#include <string_view>

#include "biphoton/simd/kernels.hpp"

namespace biphoton::simd {

#if defined(BIPHOTON_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(BIPHOTON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = []() -> const KernelTable& {
    if (const char* env = std::getenv("BIPHOTON_SIMD"); env && std::string_view(env) == "scalar")
      return scalar_kernels();
    if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace biphoton::simd
