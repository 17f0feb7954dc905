#pragma once

#include <cstdint>
#include <vector>

#include "linspar/kernels.hpp"

namespace linspar {

// Fixed-universe bitset; intersection tests go through the kernel dispatch.
class DenseBitset {
 public:
  DenseBitset() = default;
  explicit DenseBitset(std::size_t universe)
      : words_((universe + 63) / 64, 0), universe_(universe) {}

  std::size_t universe() const { return universe_; }

  void set(std::size_t bit) { words_[bit >> 6] |= std::uint64_t{1} << (bit & 63); }
  void reset(std::size_t bit) { words_[bit >> 6] &= ~(std::uint64_t{1} << (bit & 63)); }
  bool test(std::size_t bit) const {
    return (words_[bit >> 6] >> (bit & 63)) & 1;
  }

  bool intersects(const DenseBitset& other) const {
    std::size_t n = std::min(words_.size(), other.words_.size());
    return kernels::and_any(words_.data(), other.words_.data(), n);
  }

  void merge(const DenseBitset& other) {
    std::size_t n = std::min(words_.size(), other.words_.size());
    kernels::or_inplace(words_.data(), other.words_.data(), n);
  }

  std::uint64_t count() const { return kernels::popcount(words_.data(), words_.size()); }

  template <class F>
  void for_each_set(F&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word) {
        unsigned bit = static_cast<unsigned>(__builtin_ctzll(word));
        fn(w * 64 + bit);
        word &= word - 1;
      }
    }
  }

  // enumerate bits set in both
  template <class F>
  void for_each_common(const DenseBitset& other, F&& fn) const {
    std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t w = 0; w < n; ++w) {
      std::uint64_t word = words_[w] & other.words_[w];
      while (word) {
        unsigned bit = static_cast<unsigned>(__builtin_ctzll(word));
        fn(w * 64 + bit);
        word &= word - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t universe_ = 0;
};

}  // namespace linspar
