#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "linspar/graph.hpp"
#include "linspar/sortkit.hpp"

namespace linspar {

// Rooted spanning tree with everything the resistance and marking stages
// need precomputed: parent/depth arrays, the root-child subtree index of
// every node, and prefix resistances to the root (so any path resistance is
// three lookups once the LCA is known). Immutable after construction.
struct RootedTree {
  static constexpr std::uint32_t kNoSubtree = 0xFFFFFFFFu;

  NodeId root = 0;
  std::vector<NodeId> parent;           // parent[root] == root
  std::vector<std::uint32_t> depth;
  std::vector<std::uint32_t> subtree;   // kNoSubtree for the root
  std::vector<double> res_to_root;      // sum of 1/w along the path to root
  std::vector<double> parent_res;       // 1/w of the parent edge; 0 at root
  std::vector<std::uint32_t> child_offsets;
  std::vector<NodeId> children;

  NodeId node_count() const { return static_cast<NodeId>(parent.size()); }
  std::span<const NodeId> children_of(NodeId u) const {
    return {children.data() + child_offsets[u], children.data() + child_offsets[u + 1]};
  }
};

enum class TreeDirection { max, min };

struct SpanningForestParts {
  std::vector<EdgeId> tree_edges;      // exactly N-1 on a connected graph
  std::vector<EdgeId> offtree_edges;   // ascending edge id
};

// Kruskal over a sorted edge stream (union-find with path compression).
// Ties were already resolved by the stable sort feeding the cursor.
SpanningForestParts kruskal_partition(const Graph& graph, RunCursor& sorted_edges);

// Parent/depth/subtree/resistance arrays via one traversal from the root.
// Root-child subtrees are indexed 0,1,... in ascending child node id.
RootedTree root_tree(const Graph& graph, std::span<const EdgeId> tree_edges, NodeId root);

// Sort by score in the given direction (stable; ties keep input edge order),
// run Kruskal, root the result.
struct SpanningTreeResult {
  RootedTree tree;
  SpanningForestParts parts;
};
SpanningTreeResult build_spanning_tree(const Graph& graph, std::span<const double> scores,
                                       TreeDirection direction, NodeId root,
                                       unsigned workers = 1);

// Tree centroid: the node whose removal leaves the smallest largest
// component, ties to the lowest id. The pipeline roots the spanning tree
// here; it bounds every root subtree by N/2, which both balances the
// partition buckets and keeps coverage radii small.
NodeId tree_centroid(const RootedTree& tree);

// The same tree with nodes renumbered in DFS preorder. Coverage balls are
// connected tree regions, so preorder labels turn the marking stages' random
// array traffic into near-sequential access. Pure relabeling: depths,
// resistances and subtree indices carry over unchanged.
struct RelabeledTree {
  RootedTree tree;
  std::vector<NodeId> to_new;  // old node id -> preorder id
  std::vector<NodeId> to_old;
};
RelabeledTree relabel_preorder(const RootedTree& tree);

// Depth-lifting LCA: equalize depths, then ascend together.
NodeId lca(const RootedTree& tree, NodeId u, NodeId v);

// Root shortcut: endpoints in different root subtrees cannot meet below the
// root, so answer root with no ascent; otherwise defer to lca().
NodeId lca_fast(const RootedTree& tree, NodeId u, NodeId v);

// res_to_root[u] + res_to_root[v] - 2*res_to_root[lca]
double tree_resistance(const RootedTree& tree, NodeId u, NodeId v, NodeId lca_node);

std::vector<NodeId> compute_lcas(const RootedTree& tree, const Graph& graph,
                                 std::span<const EdgeId> offtree, unsigned workers = 1);

// stretch of each off-tree edge: w(e) * R_tree(u,v)
std::vector<double> resistance_scores(const RootedTree& tree, const Graph& graph,
                                      std::span<const EdgeId> offtree,
                                      std::span<const NodeId> lcas, unsigned workers = 1);
std::vector<double> resistance_scores(const RootedTree& tree, const Graph& graph,
                                      std::span<const EdgeId> offtree, unsigned workers = 1);

// Desk-scale effective-resistance oracle: assembles the graph Laplacian with
// one grounded node and solves L x = e_u - e_v directly. Only sensible for
// small inputs (hard cap N <= 2000); exists to cross-check tree_resistance.
class GroundedLaplacianSolver {
 public:
  explicit GroundedLaplacianSolver(const Graph& graph);
  ~GroundedLaplacianSolver();
  GroundedLaplacianSolver(GroundedLaplacianSolver&&) noexcept;
  GroundedLaplacianSolver& operator=(GroundedLaplacianSolver&&) noexcept;

  double resistance(NodeId u, NodeId v) const;

 private:
  struct Impl;
  Impl* impl_;
};

double pseudo_inverse_resistance_oracle(const Graph& tree_graph, NodeId u, NodeId v);

}  // namespace linspar
