#include "linspar/sortkit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "linspar/parallel.hpp"

namespace linspar {

namespace {

inline std::uint64_t raw_key(const SortItem& item) {
  return std::bit_cast<std::uint64_t>(item.key);
}

// Validates, canonicalizes -0.0 to +0.0, and accumulates all eight digit
// histograms in the same scan.
void scan_and_count(SortItem* items, std::size_t count,
                    std::array<std::array<std::uint32_t, 256>, 8>& hist) {
  for (auto& h : hist) h.fill(0);
  for (std::size_t i = 0; i < count; ++i) {
    double x = items[i].key;
    if (std::isnan(x) || std::isinf(x) || x < 0.0)
      throw std::invalid_argument("radix_sort: key must be a nonnegative finite double");
    if (x == 0.0) items[i].key = 0.0;  // fold -0.0 into the +0.0 encoding
    std::uint64_t bits = raw_key(items[i]);
    for (unsigned pass = 0; pass < 8; ++pass) ++hist[pass][(bits >> (pass * 8)) & 0xFF];
  }
}

// Eight stable relocation rounds, least significant digit first, ping-ponging
// between src and scratch. Even round count lands the result back in src.
void relocate_rounds(SortItem* src, SortItem* scratch, std::size_t count,
                     std::array<std::array<std::uint32_t, 256>, 8>& hist) {
  SortItem* from = src;
  SortItem* to = scratch;
  for (unsigned pass = 0; pass < 8; ++pass) {
    std::array<std::uint32_t, 256> offsets;
    std::uint32_t running = 0;
    for (unsigned d = 0; d < 256; ++d) {
      offsets[d] = running;
      running += hist[pass][d];
    }
    for (std::size_t i = 0; i < count; ++i) {
      unsigned digit = static_cast<unsigned>((raw_key(from[i]) >> (pass * 8)) & 0xFF);
      to[offsets[digit]++] = from[i];
    }
    std::swap(from, to);
  }
}

void radix_sort_span(SortItem* items, std::size_t count, SortItem* scratch) {
  if (count < 2) {
    if (count == 1) {
      std::array<std::array<std::uint32_t, 256>, 8> hist;
      scan_and_count(items, count, hist);  // still validate the lone key
    }
    return;
  }
  std::array<std::array<std::uint32_t, 256>, 8> hist;
  scan_and_count(items, count, hist);
  relocate_rounds(items, scratch, count, hist);
}

// Two-way stable ascending merge; `left` must hold earlier input positions.
std::vector<SortItem> merge_runs(const std::vector<SortItem>& left,
                                 const std::vector<SortItem>& right) {
  std::vector<SortItem> out;
  out.reserve(left.size() + right.size());
  std::size_t i = 0, j = 0;
  while (i < left.size() && j < right.size()) {
    if (raw_key(right[j]) < raw_key(left[i]))
      out.push_back(right[j++]);
    else
      out.push_back(left[i++]);
  }
  out.insert(out.end(), left.begin() + i, left.end());
  out.insert(out.end(), right.begin() + j, right.end());
  return out;
}

const std::vector<SortItem>& run_at(const SortedRuns& runs, std::size_t idx) {
  static const std::vector<SortItem> empty;
  return idx < runs.runs.size() ? runs.runs[idx] : empty;
}

// One step of the tie-group descending walk shared by the cursor and the
// top-K prefix extraction.
bool desc_next(const SortedRuns& runs, SortedRuns::DescState& st, SortItem& out) {
  const std::vector<SortItem>& left = run_at(runs, 0);
  const std::vector<SortItem>& right = run_at(runs, 1);
  if (!st.in_group) {
    if (st.left_remaining == 0 && st.right_remaining == 0) return false;
    bool has_left = st.left_remaining > 0;
    bool has_right = st.right_remaining > 0;
    std::uint64_t key_left = has_left ? raw_key(left[st.left_remaining - 1]) : 0;
    std::uint64_t key_right = has_right ? raw_key(right[st.right_remaining - 1]) : 0;
    std::uint64_t top = has_left && has_right ? std::max(key_left, key_right)
                                              : (has_left ? key_left : key_right);
    st.group_left_begin = st.left_remaining;
    if (has_left && key_left == top) {
      while (st.group_left_begin > 0 && raw_key(left[st.group_left_begin - 1]) == top)
        --st.group_left_begin;
    }
    st.group_right_begin = st.right_remaining;
    if (has_right && key_right == top) {
      while (st.group_right_begin > 0 && raw_key(right[st.group_right_begin - 1]) == top)
        --st.group_right_begin;
    }
    st.group_pos = 0;
    st.in_group = true;
  }
  std::size_t left_part = st.left_remaining - st.group_left_begin;
  std::size_t group_size = left_part + (st.right_remaining - st.group_right_begin);
  out = st.group_pos < left_part ? left[st.group_left_begin + st.group_pos]
                                 : right[st.group_right_begin + (st.group_pos - left_part)];
  if (++st.group_pos == group_size) {
    st.left_remaining = st.group_left_begin;
    st.right_remaining = st.group_right_begin;
    st.in_group = false;
  }
  return true;
}

}  // namespace

std::uint64_t double_to_key(double x) {
  if (std::isnan(x) || std::isinf(x) || x < 0.0)
    throw std::invalid_argument("double_to_key: key must be a nonnegative finite double");
  if (x == 0.0) return 0;  // -0.0 folds into the +0.0 encoding
  return std::bit_cast<std::uint64_t>(x);
}

std::vector<SortItem> radix_sort(std::vector<SortItem> items) {
  std::vector<SortItem> scratch(items.size());
  radix_sort_span(items.data(), items.size(), scratch.data());
  return items;
}

SortedRuns parallel_sort(std::vector<SortItem> items, unsigned workers,
                         std::optional<TopKPlan> plan) {
  if (workers < 1) throw std::invalid_argument("parallel_sort: workers must be >= 1");
  if (plan && plan->workers != workers)
    throw std::invalid_argument("parallel_sort: plan worker count disagrees");

  SortedRuns result;
  result.total = items.size();

  const std::size_t count = items.size();
  const std::size_t block = (count + workers - 1) / workers;
  std::vector<std::vector<SortItem>> runs;
  if (count > 0) {
    std::size_t block_count = (count + block - 1) / block;
    runs.resize(block_count);
    unsigned sorters = static_cast<unsigned>(std::min<std::size_t>(workers, block_count));
    run_workers(sorters, [&](unsigned id) {
      std::vector<SortItem> scratch;
      for (std::size_t b = id; b < block_count; b += sorters) {
        std::size_t begin = b * block;
        std::size_t end = std::min(count, begin + block);
        scratch.resize(end - begin);
        radix_sort_span(items.data() + begin, end - begin, scratch.data());
        runs[b].assign(items.begin() + begin, items.begin() + end);
      }
    });
  }

  // merge adjacent pairs level by level; stop with two runs (deferred final
  // merge). Odd run counts promote the trailing run unchanged.
  while (runs.size() > 2) {
    std::size_t pairs = runs.size() / 2;
    std::vector<std::vector<SortItem>> merged(pairs + (runs.size() & 1));
    unsigned mergers = static_cast<unsigned>(std::min<std::size_t>(workers, pairs));
    run_workers(mergers, [&](unsigned id) {
      for (std::size_t p = id; p < pairs; p += mergers) {
        merged[p] = merge_runs(runs[2 * p], runs[2 * p + 1]);
      }
    });
    if (runs.size() & 1) merged.back() = std::move(runs.back());
    runs = std::move(merged);
  }
  result.runs = std::move(runs);

  result.resume.left_remaining = run_at(result, 0).size();
  result.resume.right_remaining = run_at(result, 1).size();
  if (plan && plan->k > 0) {
    std::size_t want = std::min(plan->k, result.total);
    result.merged_prefix.reserve(want);
    SortItem item;
    while (result.merged_prefix.size() < want && desc_next(result, result.resume, item))
      result.merged_prefix.push_back(item);
    result.merged_prefix_len = result.merged_prefix.size();
  }
  return result;
}

RunCursor::RunCursor(const SortedRuns& runs, SortDirection direction)
    : runs_(runs), direction_(direction), desc_(runs.resume) {
  if (runs.runs.size() > 2)
    throw std::invalid_argument("RunCursor: more than two runs");
}

bool RunCursor::next(SortItem& out) {
  if (direction_ == SortDirection::ascending) {
    const std::vector<SortItem>& left = run_at(runs_, 0);
    const std::vector<SortItem>& right = run_at(runs_, 1);
    bool has_left = asc_left_ < left.size();
    bool has_right = asc_right_ < right.size();
    if (!has_left && !has_right) return false;
    if (has_left && (!has_right || raw_key(left[asc_left_]) <= raw_key(right[asc_right_]))) {
      out = left[asc_left_++];
    } else {
      out = right[asc_right_++];
    }
    return true;
  }
  if (prefix_pos_ < runs_.merged_prefix_len) {
    out = runs_.merged_prefix[prefix_pos_++];
    return true;
  }
  return desc_next(runs_, desc_, out);
}

std::vector<SortItem> drain(const SortedRuns& runs, SortDirection direction) {
  std::vector<SortItem> out;
  out.reserve(runs.total);
  RunCursor cursor(runs, direction);
  SortItem item;
  while (cursor.next(item)) out.push_back(item);
  return out;
}

}  // namespace linspar
