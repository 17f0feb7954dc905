#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "linspar/marking.hpp"
#include "linspar/tree.hpp"

namespace linspar {

// Mapping-function key for an off-tree edge. Keys split the crossing-edge
// workload into independent units: per-LCA below the root, and per unordered
// root-subtree pair for the (dominant) root-LCA class. Node and subtree
// indices are 0-based; the subtree pairing needs 64 bits because the root's
// degree is unbounded.
//
//   lca                          if lca != root
//   N                            if u == root or v == root
//   N + 1 + C(S1,2) + S2         otherwise, S1 > S2 the endpoint subtrees
std::uint64_t partition_key(const RootedTree& tree, NodeId u, NodeId v, NodeId lca_node);

struct PartitionPlan {
  struct Bucket {
    std::uint64_t key = 0;
    std::vector<std::uint32_t> positions;  // record positions, global sorted order
  };
  std::vector<Bucket> buckets;  // ascending key
};

// Stable bucketing of the crossing records by partition key. Non-crossing
// records are not bucketed; they go straight to the recovery stage.
PartitionPlan build_partitions(const RootedTree& tree, std::span<const EdgeRecord> records);

// Longest-processing-time-first assignment: repeatedly hand the largest
// remaining bucket to the least-loaded worker. Any schedule is correct;
// this one just balances load.
std::vector<std::vector<std::uint32_t>> greedy_dispatch(std::span<const std::size_t> sizes,
                                                        unsigned workers);

enum class DispatchMode { static_split, greedy };

struct ThreadConfig {
  unsigned workers = 1;
  DispatchMode dispatch = DispatchMode::greedy;
};

// Parallel crossing stage: each bucket is processed sequentially in global
// sorted order against its own bucket-local token store, and buckets are
// pulled by a pool of workers (largest-first under greedy dispatch). Keying
// the store by bucket rather than by (lca,node) makes every write
// bucket-private, so no locks are needed and the flags are bit-identical to
// the sequential stage for every worker count. Sets is_marked/is_selected
// on the crossing records; non-crossing records are untouched.
//
// `coverage`, when given, receives one flag per record: covered by ANY
// selected edge of its bucket, not just earlier ones. The recovery pass
// reuses it for groups whose selection it did not change.
void run_marking_parallel(const PartitionPlan& plan, std::span<EdgeRecord> records,
                          const RootedTree& tree, const ThreadConfig& config,
                          std::vector<char>* coverage = nullptr);

}  // namespace linspar
