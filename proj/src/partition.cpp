#include "linspar/partition.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <queue>
#include <stdexcept>

#include "ball.hpp"
#include "linspar/parallel.hpp"

namespace linspar {

std::uint64_t partition_key(const RootedTree& tree, NodeId u, NodeId v, NodeId lca_node) {
  const std::uint64_t n = tree.node_count();
  if (lca_node != tree.root) return lca_node;
  if (u == tree.root || v == tree.root) return n;
  std::uint64_t su = tree.subtree[u];
  std::uint64_t sv = tree.subtree[v];
  if (su == sv)
    throw std::logic_error("partition_key: endpoints share a root subtree but LCA is root");
  std::uint64_t s1 = std::max(su, sv);
  std::uint64_t s2 = std::min(su, sv);
  return n + 1 + s1 * (s1 - 1) / 2 + s2;
}

PartitionPlan build_partitions(const RootedTree& tree, std::span<const EdgeRecord> records) {
  std::map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  for (std::uint32_t pos = 0; pos < records.size(); ++pos) {
    const EdgeRecord& r = records[pos];
    if (!r.is_crossing) continue;
    buckets[partition_key(tree, r.u, r.v, r.lca)].push_back(pos);
  }
  PartitionPlan plan;
  plan.buckets.reserve(buckets.size());
  for (auto& [key, positions] : buckets)
    plan.buckets.push_back({key, std::move(positions)});
  return plan;
}

std::vector<std::vector<std::uint32_t>> greedy_dispatch(std::span<const std::size_t> sizes,
                                                        unsigned workers) {
  if (workers < 1) throw std::invalid_argument("greedy_dispatch: workers must be >= 1");
  std::vector<std::uint32_t> order(sizes.size());
  for (std::uint32_t i = 0; i < sizes.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return sizes[a] > sizes[b]; });

  using Load = std::pair<std::size_t, unsigned>;  // (load, worker), min-heap
  std::priority_queue<Load, std::vector<Load>, std::greater<Load>> idle;
  for (unsigned w = 0; w < workers; ++w) idle.push({0, w});

  std::vector<std::vector<std::uint32_t>> assignment(workers);
  for (std::uint32_t bucket : order) {
    auto [load, w] = idle.top();
    idle.pop();
    assignment[w].push_back(bucket);
    idle.push({load + sizes[bucket], w});
  }
  return assignment;
}

namespace {

// Per-worker scratch for bucket-local marking.
struct BucketScratch {
  detail::GroupMaskStore masks;
  detail::BallScratch ball_u;
  detail::BallScratch ball_v;
  detail::LocalIncidence incidence;

  explicit BucketScratch(NodeId n) : masks(n), ball_u(n), ball_v(n), incidence(n) {}
};

// One bucket, sequential in global sorted order. Coverage is tracked in
// per-node bitmaps while the bucket has few selections; once the mask width
// is exhausted the accumulated coverage is flushed into the shared covered[]
// flags and later selections propagate their coverage directly through a
// bucket-local incidence. covered[] writes stay inside this bucket's
// positions, so buckets never race.
void process_bucket(const PartitionPlan::Bucket& bucket, std::span<EdgeRecord> records,
                    const RootedTree& tree, std::vector<char>& covered,
                    BucketScratch& scratch) {
  scratch.masks.begin_group();
  bool push_mode = false;
  for (std::uint32_t position : bucket.positions) {
    EdgeRecord& r = records[position];
    r.is_marked =
        covered[position] || (!push_mode && scratch.masks.covered(r.u, r.v));
    r.is_selected = !r.is_marked;
    if (!r.is_selected) continue;
    std::uint32_t beta = compute_beta(tree, r.u, r.v, r.lca, true);
    if (!push_mode) {
      scratch.ball_u.fill(tree, r.u, beta);
      for (const auto& visit : scratch.ball_u.nodes) scratch.masks.add(visit.node);
      scratch.ball_u.fill(tree, r.v, beta);
      for (const auto& visit : scratch.ball_u.nodes) scratch.masks.add(visit.node);
      scratch.masks.commit_selected();
      if (scratch.masks.mask_full()) {
        for (std::uint32_t p : bucket.positions) {
          const EdgeRecord& e = records[p];
          if (scratch.masks.covered(e.u, e.v)) covered[p] = 1;
        }
        scratch.incidence.build(records, bucket.positions);
        push_mode = true;
      }
    } else {
      detail::push_covered_edges(tree, r.u, r.v, beta, scratch.incidence, scratch.ball_u,
                                 scratch.ball_v,
                                 [&](std::uint32_t target) { covered[target] = 1; });
    }
  }
  if (!push_mode) {
    // flush the mask coverage so covered[] describes the whole bucket
    for (std::uint32_t p : bucket.positions) {
      const EdgeRecord& e = records[p];
      if (scratch.masks.covered(e.u, e.v)) covered[p] = 1;
    }
  }
}

}  // namespace

void run_marking_parallel(const PartitionPlan& plan, std::span<EdgeRecord> records,
                          const RootedTree& tree, const ThreadConfig& config,
                          std::vector<char>* coverage) {
  if (config.workers < 1)
    throw std::invalid_argument("run_marking_parallel: workers must be >= 1");
  if (coverage) coverage->assign(records.size(), 0);
  const std::size_t bucket_count = plan.buckets.size();
  if (bucket_count == 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(config.workers, bucket_count));

  std::vector<char> internal_covered;
  std::vector<char>& covered = coverage ? *coverage : internal_covered;
  if (!coverage) covered.assign(records.size(), 0);

  if (config.dispatch == DispatchMode::greedy) {
    // dynamic pull, largest bucket first
    std::vector<std::uint32_t> order(bucket_count);
    for (std::uint32_t i = 0; i < bucket_count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return plan.buckets[a].positions.size() > plan.buckets[b].positions.size();
    });
    std::atomic<std::size_t> cursor{0};
    run_workers(workers, [&](unsigned) {
      BucketScratch scratch(tree.node_count());
      for (;;) {
        std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
        if (i >= bucket_count) break;
        process_bucket(plan.buckets[order[i]], records, tree, covered, scratch);
      }
    });
  } else {
    run_workers(workers, [&](unsigned id) {
      BucketScratch scratch(tree.node_count());
      for (std::size_t i = id; i < bucket_count; i += workers)
        process_bucket(plan.buckets[i], records, tree, covered, scratch);
    });
  }
}

}  // namespace linspar
