#pragma once

#include <cstddef>
#include <cstdint>

// Word-array kernels behind the bitset operations. Each kernel has a scalar
// reference implementation and an AVX2 variant; the active one is picked at
// load time from CPU features. Both variants must agree bit-for-bit on every
// input (equivalence-tested), so callers never care which one runs.

namespace linspar::kernels {

// true iff (a[i] & b[i]) != 0 for some i < n
using AndAnyFn = bool (*)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
// dst[i] |= src[i]
using OrInplaceFn = void (*)(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
// sum of popcount(a[i])
using PopcountFn = std::uint64_t (*)(const std::uint64_t* a, std::size_t n);

bool and_any_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
void or_inplace_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::uint64_t popcount_scalar(const std::uint64_t* a, std::size_t n);

bool and_any_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
void or_inplace_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t n);

struct Dispatch {
  AndAnyFn and_any;
  OrInplaceFn or_inplace;
  PopcountFn popcount;
  const char* backend;  // "scalar" or "avx2"
};

// Resolved once at startup; stable for the process lifetime.
const Dispatch& active();

// Test hook: true when the AVX2 variants are callable on this machine.
bool avx2_available();

inline bool and_any(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  return active().and_any(a, b, n);
}
inline void or_inplace(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
  active().or_inplace(dst, src, n);
}
inline std::uint64_t popcount(const std::uint64_t* a, std::size_t n) {
  return active().popcount(a, n);
}

}  // namespace linspar::kernels
