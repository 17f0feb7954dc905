#include "linspar/kernels.hpp"

#include <bit>

namespace linspar::kernels {

bool and_any_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] & b[i]) return true;
  }
  return false;
}

void or_inplace_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

std::uint64_t popcount_scalar(const std::uint64_t* a, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i]));
  return total;
}

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Dispatch& active() {
  static const Dispatch dispatch = [] {
    if (avx2_available()) {
      return Dispatch{and_any_avx2, or_inplace_avx2, popcount_avx2, "avx2"};
    }
    return Dispatch{and_any_scalar, or_inplace_scalar, popcount_scalar, "scalar"};
  }();
  return dispatch;
}

}  // namespace linspar::kernels
