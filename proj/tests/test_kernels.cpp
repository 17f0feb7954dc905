#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "linspar/bitset.hpp"
#include "linspar/kernels.hpp"

using namespace linspar;

TEST_CASE("scalar and simd kernels agree on random word arrays") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    // odd lengths on purpose: tails must match too
    std::size_t n = rng() % 133;
    std::vector<std::uint64_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      // sparse words so and_any is not trivially true
      a[i] = rng() & rng() & rng();
      b[i] = rng() & rng() & rng();
    }
    bool scalar = kernels::and_any_scalar(a.data(), b.data(), n);
    CHECK(scalar == kernels::and_any_avx2(a.data(), b.data(), n));
    CHECK(scalar == kernels::and_any(a.data(), b.data(), n));

    CHECK(kernels::popcount_scalar(a.data(), n) == kernels::popcount_avx2(a.data(), n));

    std::vector<std::uint64_t> d1 = a, d2 = a;
    kernels::or_inplace_scalar(d1.data(), b.data(), n);
    kernels::or_inplace_avx2(d2.data(), b.data(), n);
    CHECK(d1 == d2);
  }
}

TEST_CASE("dispatch picks a backend consistent with the cpu") {
  const kernels::Dispatch& active = kernels::active();
  if (kernels::avx2_available()) {
    CHECK(std::string(active.backend) == "avx2");
  } else {
    CHECK(std::string(active.backend) == "scalar");
  }
}

TEST_CASE("dense bitset set/test/intersect") {
  DenseBitset a(300), b(300);
  CHECK_FALSE(a.intersects(b));
  a.set(0);
  a.set(64);
  a.set(299);
  b.set(298);
  CHECK_FALSE(a.intersects(b));
  b.set(299);
  CHECK(a.intersects(b));
  CHECK(a.test(64));
  a.reset(64);
  CHECK_FALSE(a.test(64));
  CHECK(a.count() == 2);

  std::vector<std::size_t> common;
  a.for_each_common(b, [&](std::size_t bit) { common.push_back(bit); });
  CHECK(common == std::vector<std::size_t>{299});
}
