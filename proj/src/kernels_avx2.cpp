#include "linspar/kernels.hpp"

#include <bit>

#if defined(LINSPAR_HAVE_AVX2_TU)
#include <immintrin.h>

namespace linspar::kernels {

bool and_any_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i vand = _mm256_and_si256(va, vb);
    if (!_mm256_testz_si256(vand, vand)) return true;
  }
  for (; i < n; ++i) {
    if (a[i] & b[i]) return true;
  }
  return false;
}

void or_inplace_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i vd = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(vd, vs));
  }
  for (; i < n; ++i) dst[i] |= src[i];
}

std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t n) {
  // No 64-bit vector popcount before AVX-512; unrolled scalar popcnt is the
  // usual answer at these sizes.
  std::uint64_t t0 = 0, t1 = 0, t2 = 0, t3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    t0 += static_cast<std::uint64_t>(std::popcount(a[i]));
    t1 += static_cast<std::uint64_t>(std::popcount(a[i + 1]));
    t2 += static_cast<std::uint64_t>(std::popcount(a[i + 2]));
    t3 += static_cast<std::uint64_t>(std::popcount(a[i + 3]));
  }
  for (; i < n; ++i) t0 += static_cast<std::uint64_t>(std::popcount(a[i]));
  return t0 + t1 + t2 + t3;
}

}  // namespace linspar::kernels

#else

namespace linspar::kernels {

// Toolchain cannot build AVX2 code; route to the scalar reference so the
// symbols still exist. The runtime dispatcher never selects these without
// CPU support anyway.
bool and_any_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return and_any_scalar(a, b, n);
}
void or_inplace_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  or_inplace_scalar(dst, src, n);
}
std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t n) {
  return popcount_scalar(a, n);
}

}  // namespace linspar::kernels

#endif
