#include "linspar/bfs.hpp"

#include <barrier>
#include <limits>
#include <stdexcept>

#include "linspar/parallel.hpp"

namespace linspar {

namespace {
constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
}

NodeId select_root(const Graph& graph) {
  if (graph.node_count() == 0) throw std::invalid_argument("select_root: empty graph");
  NodeId best = 0;
  std::size_t best_degree = graph.degree(0);
  for (NodeId u = 1; u < graph.node_count(); ++u) {
    if (graph.degree(u) > best_degree) {
      best = u;
      best_degree = graph.degree(u);
    }
  }
  return best;
}

BfsLevels bfs(const Graph& graph, NodeId root) {
  if (root >= graph.node_count()) throw std::invalid_argument("bfs: root out of range");
  BfsLevels out{root, std::vector<std::uint32_t>(graph.node_count(), kUnset)};
  std::vector<NodeId> queue(graph.node_count());
  std::size_t head = 0, tail = 0;
  queue[tail++] = root;
  out.level[root] = 0;
  while (head < tail) {
    NodeId u = queue[head++];
    std::uint32_t next = out.level[u] + 1;
    for (const Graph::Neighbor& nb : graph.neighbors(u)) {
      if (out.level[nb.node] == kUnset) {
        out.level[nb.node] = next;
        queue[tail++] = nb.node;
      }
    }
  }
  if (tail != graph.node_count())
    throw std::invalid_argument("bfs: graph is not connected from the root");
  return out;
}

BfsLevels bfs_parallel(const Graph& graph, NodeId root, unsigned workers,
                       std::atomic<std::uint64_t>* expansions) {
  if (root >= graph.node_count()) throw std::invalid_argument("bfs: root out of range");
  if (workers < 1) throw std::invalid_argument("bfs_parallel: workers must be >= 1");
  const NodeId n = graph.node_count();

  std::vector<std::atomic<std::uint32_t>> level(n);
  for (NodeId i = 0; i < n; ++i) level[i].store(kUnset, std::memory_order_relaxed);
  level[root].store(0, std::memory_order_relaxed);

  std::vector<NodeId> current{root};
  std::vector<NodeId> next(n);
  std::atomic<std::uint32_t> next_count{0};
  std::atomic<std::size_t> cursor{0};
  std::uint32_t depth = 0;

  std::barrier sync(static_cast<std::ptrdiff_t>(workers));
  std::atomic<bool> done{false};

  run_workers(workers, [&](unsigned id) {
    std::vector<NodeId> local;
    local.reserve(256);
    while (true) {
      // claim slices of the shared frontier
      const std::size_t frontier_size = current.size();
      const std::size_t grain = std::max<std::size_t>(1, frontier_size / (workers * 8));
      std::uint64_t popped = 0;
      for (;;) {
        std::size_t begin = cursor.fetch_add(grain, std::memory_order_relaxed);
        if (begin >= frontier_size) break;
        std::size_t end = std::min(frontier_size, begin + grain);
        for (std::size_t i = begin; i < end; ++i) {
          NodeId u = current[i];
          ++popped;
          std::uint32_t next_level = depth + 1;
          for (const Graph::Neighbor& nb : graph.neighbors(u)) {
            std::uint32_t expected = kUnset;
            if (level[nb.node].load(std::memory_order_relaxed) == kUnset &&
                level[nb.node].compare_exchange_strong(expected, next_level,
                                                       std::memory_order_relaxed)) {
              local.push_back(nb.node);
            }
          }
        }
      }
      if (expansions && popped) expansions->fetch_add(popped, std::memory_order_relaxed);
      // local-to-global merge: one counter bump reserves a slot range
      if (!local.empty()) {
        std::uint32_t offset =
            next_count.fetch_add(static_cast<std::uint32_t>(local.size()),
                                 std::memory_order_relaxed);
        std::copy(local.begin(), local.end(), next.begin() + offset);
        local.clear();
      }
      sync.arrive_and_wait();
      if (id == 0) {
        std::uint32_t produced = next_count.load(std::memory_order_relaxed);
        current.assign(next.begin(), next.begin() + produced);
        next_count.store(0, std::memory_order_relaxed);
        cursor.store(0, std::memory_order_relaxed);
        ++depth;
        done.store(current.empty(), std::memory_order_relaxed);
      }
      sync.arrive_and_wait();
      if (done.load(std::memory_order_relaxed)) break;
    }
  });

  BfsLevels out{root, std::vector<std::uint32_t>(n)};
  for (NodeId i = 0; i < n; ++i) {
    out.level[i] = level[i].load(std::memory_order_relaxed);
    if (out.level[i] == kUnset)
      throw std::invalid_argument("bfs_parallel: graph is not connected from the root");
  }
  return out;
}

double default_effectiveness(double w, std::uint32_t level_u, std::uint32_t level_v) {
  return w * (static_cast<double>(level_u) + static_cast<double>(level_v) + 1.0);
}

std::vector<double> effectiveness_scores(const Graph& graph, const BfsLevels& levels,
                                         EffectivenessFormula formula) {
  if (levels.level.size() != graph.node_count())
    throw std::invalid_argument("effectiveness_scores: levels do not match graph");
  std::vector<double> scores(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    scores[e] = formula(edge.w, levels.level[edge.u], levels.level[edge.v]);
  }
  return scores;
}

}  // namespace linspar
