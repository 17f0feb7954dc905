#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace linspar {

// Keys are nonnegative finite doubles. For that domain the raw IEEE-754 bit
// pattern read as an unsigned integer orders exactly like the float compare,
// which is what lets an integer radix sort stand in for a float sort.
std::uint64_t double_to_key(double x);

struct SortItem {
  double key = 0.0;
  std::uint32_t payload = 0;

  friend bool operator==(const SortItem&, const SortItem&) = default;
};

// Stable LSD radix sort: one validation/counting scan builds all eight
// 256-entry digit histograms, then eight relocation rounds. O(L).
std::vector<SortItem> radix_sort(std::vector<SortItem> items);

struct TopKPlan {
  std::size_t k = 0;
  unsigned workers = 1;
};

enum class SortDirection { ascending, descending };

// Output of parallel_sort: at most two stable-ascending runs that together
// cover the whole input (the final merge is deferred to whoever consumes
// them), plus an optionally pre-merged descending top-K prefix. run 0 holds
// strictly earlier input positions than run 1, which is what keeps ties
// stable across the deferred merge.
struct SortedRuns {
  std::vector<std::vector<SortItem>> runs;
  std::vector<SortItem> merged_prefix;
  std::size_t merged_prefix_len = 0;
  std::size_t total = 0;

  // descending-cursor snapshot taken right after the prefix was extracted
  struct DescState {
    std::size_t left_remaining = 0;
    std::size_t right_remaining = 0;
    bool in_group = false;
    std::size_t group_left_begin = 0;
    std::size_t group_right_begin = 0;
    std::size_t group_pos = 0;
  };
  DescState resume;
};

// Splits the input into `workers` near-equal contiguous blocks, radix-sorts
// the blocks in parallel, then merges pairs up the merge tree but leaves the
// final merge undone. With a TopKPlan the top k items (descending by key)
// are additionally merged into `merged_prefix`; everything else stays in the
// runs and is still reachable through the cursor.
SortedRuns parallel_sort(std::vector<SortItem> items, unsigned workers,
                         std::optional<TopKPlan> plan = std::nullopt);

// Single-consumer merging cursor over SortedRuns. Ascending drains are a
// plain two-way merge preferring run 0 on equal keys. Descending drains must
// still emit equal keys in input order, so the cursor walks tie groups: it
// finds the maximal block of equal keys at the top of each run and emits
// run 0's block forward, then run 1's block forward, before moving past the
// group. Reversing the runs item-by-item would flip tie order and break
// stability.
class RunCursor {
 public:
  RunCursor(const SortedRuns& runs, SortDirection direction);
  bool next(SortItem& out);

 private:
  const SortedRuns& runs_;
  SortDirection direction_;
  // ascending state
  std::size_t asc_left_ = 0;
  std::size_t asc_right_ = 0;
  // descending state
  std::size_t prefix_pos_ = 0;
  SortedRuns::DescState desc_;
};

std::vector<SortItem> drain(const SortedRuns& runs, SortDirection direction);

}  // namespace linspar
