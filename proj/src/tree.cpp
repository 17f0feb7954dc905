#include "linspar/tree.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

#include "linspar/parallel.hpp"

namespace linspar {

namespace {

struct UnionFind {
  std::vector<NodeId> parent;

  explicit UnionFind(NodeId n) : parent(n) {
    for (NodeId i = 0; i < n; ++i) parent[i] = i;
  }
  NodeId find(NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(NodeId a, NodeId b) {
    NodeId ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

}  // namespace

SpanningForestParts kruskal_partition(const Graph& graph, RunCursor& sorted_edges) {
  const NodeId n = graph.node_count();
  SpanningForestParts parts;
  parts.tree_edges.reserve(n > 0 ? n - 1 : 0);
  UnionFind uf(n);
  NodeId joined = 0;
  SortItem item;
  while (sorted_edges.next(item)) {
    EdgeId id = item.payload;
    const Edge& e = graph.edge(id);
    if (joined + 1 < n && uf.unite(e.u, e.v)) {
      parts.tree_edges.push_back(id);
      ++joined;
    } else {
      parts.offtree_edges.push_back(id);
    }
  }
  if (n > 0 && joined != n - 1)
    throw std::invalid_argument("kruskal_partition: graph is not connected");
  std::sort(parts.offtree_edges.begin(), parts.offtree_edges.end());
  return parts;
}

RootedTree root_tree(const Graph& graph, std::span<const EdgeId> tree_edges, NodeId root) {
  const NodeId n = graph.node_count();
  if (root >= n) throw std::invalid_argument("root_tree: root out of range");
  if (tree_edges.size() + 1 != n)
    throw std::invalid_argument("root_tree: expected exactly N-1 tree edges");

  // tree adjacency (CSR over tree edges only)
  std::vector<std::uint32_t> deg(n + 1, 0);
  for (EdgeId id : tree_edges) {
    ++deg[graph.edge(id).u + 1];
    ++deg[graph.edge(id).v + 1];
  }
  for (NodeId i = 0; i < n; ++i) deg[i + 1] += deg[i];
  std::vector<Graph::Neighbor> adj(tree_edges.size() * 2);
  std::vector<std::uint32_t> cursor(deg.begin(), deg.end() - 1);
  for (EdgeId id : tree_edges) {
    const Edge& e = graph.edge(id);
    adj[cursor[e.u]++] = {e.v, id};
    adj[cursor[e.v]++] = {e.u, id};
  }

  RootedTree tree;
  tree.root = root;
  tree.parent.assign(n, kInvalidNode);
  tree.depth.assign(n, 0);
  tree.subtree.assign(n, RootedTree::kNoSubtree);
  tree.res_to_root.assign(n, 0.0);
  tree.parent_res.assign(n, 0.0);

  std::vector<NodeId> order(n);
  std::size_t head = 0, tail = 0;
  order[tail++] = root;
  tree.parent[root] = root;
  while (head < tail) {
    NodeId u = order[head++];
    for (std::uint32_t a = deg[u]; a < deg[u + 1]; ++a) {
      NodeId v = adj[a].node;
      if (tree.parent[v] != kInvalidNode) continue;
      tree.parent[v] = u;
      tree.depth[v] = tree.depth[u] + 1;
      tree.parent_res[v] = 1.0 / graph.edge(adj[a].edge).w;
      tree.res_to_root[v] = tree.res_to_root[u] + tree.parent_res[v];
      order[tail++] = v;
    }
  }
  if (tail != n) throw std::invalid_argument("root_tree: tree edges do not span the graph");

  // children CSR from the BFS parents
  tree.child_offsets.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v)
    if (v != root) ++tree.child_offsets[tree.parent[v] + 1];
  for (NodeId i = 0; i < n; ++i) tree.child_offsets[i + 1] += tree.child_offsets[i];
  tree.children.resize(n > 0 ? n - 1 : 0);
  std::vector<std::uint32_t> child_cursor(tree.child_offsets.begin(),
                                          tree.child_offsets.end() - 1);
  // fill in ascending child id so subtree numbering below is canonical
  for (NodeId v = 0; v < n; ++v)
    if (v != root) tree.children[child_cursor[tree.parent[v]]++] = v;

  // subtree index: position of the root child this node hangs under,
  // in ascending root-child id
  std::uint32_t index = 0;
  for (NodeId child : tree.children_of(root)) {
    tree.subtree[child] = index++;
  }
  for (std::size_t i = 0; i < tail; ++i) {
    NodeId u = order[i];
    if (u == root || tree.parent[u] == root) continue;
    // BFS order guarantees the parent is already labeled
    tree.subtree[u] = tree.subtree[tree.parent[u]];
  }
  return tree;
}

SpanningTreeResult build_spanning_tree(const Graph& graph, std::span<const double> scores,
                                       TreeDirection direction, NodeId root, unsigned workers) {
  if (scores.size() != graph.edge_count())
    throw std::invalid_argument("build_spanning_tree: one score per edge required");
  std::vector<SortItem> items(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) items[e] = {scores[e], e};
  SortedRuns runs = parallel_sort(std::move(items), workers);
  RunCursor cursor(runs, direction == TreeDirection::max ? SortDirection::descending
                                                         : SortDirection::ascending);
  SpanningTreeResult result;
  result.parts = kruskal_partition(graph, cursor);
  result.tree = root_tree(graph, result.parts.tree_edges, root);
  return result;
}

NodeId tree_centroid(const RootedTree& tree) {
  const NodeId n = tree.node_count();
  if (n == 0) throw std::invalid_argument("tree_centroid: empty tree");
  // subtree sizes, children before parents (deepest first)
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return tree.depth[a] > tree.depth[b]; });
  std::vector<std::uint32_t> size(n, 1);
  for (NodeId v : order)
    if (v != tree.root) size[tree.parent[v]] += size[v];

  NodeId best = tree.root;
  std::uint32_t best_worst = n;
  for (NodeId v = 0; v < n; ++v) {
    std::uint32_t worst = n - size[v];
    for (NodeId c : tree.children_of(v)) worst = std::max(worst, size[c]);
    if (worst < best_worst) {
      best_worst = worst;
      best = v;
    }
  }
  return best;
}

RelabeledTree relabel_preorder(const RootedTree& tree) {
  const NodeId n = tree.node_count();
  RelabeledTree out;
  out.to_new.assign(n, kInvalidNode);
  out.to_old.reserve(n);

  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    out.to_new[v] = static_cast<NodeId>(out.to_old.size());
    out.to_old.push_back(v);
    std::span<const NodeId> kids = tree.children_of(v);
    for (std::size_t i = kids.size(); i-- > 0;) stack.push_back(kids[i]);
  }

  RootedTree& t = out.tree;
  t.root = out.to_new[tree.root];
  t.parent.resize(n);
  t.depth.resize(n);
  t.subtree.resize(n);
  t.res_to_root.resize(n);
  t.parent_res.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    NodeId nv = out.to_new[v];
    t.parent[nv] = out.to_new[tree.parent[v]];
    t.depth[nv] = tree.depth[v];
    t.subtree[nv] = tree.subtree[v];
    t.res_to_root[nv] = tree.res_to_root[v];
    t.parent_res[nv] = tree.parent_res[v];
  }
  t.child_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId v = 0; v < n; ++v)
    if (v != t.root) ++t.child_offsets[t.parent[v] + 1];
  for (NodeId i = 0; i < n; ++i) t.child_offsets[i + 1] += t.child_offsets[i];
  t.children.resize(n > 0 ? n - 1 : 0);
  std::vector<std::uint32_t> fill(t.child_offsets.begin(), t.child_offsets.end() - 1);
  for (NodeId v = 0; v < n; ++v)
    if (v != t.root) t.children[fill[t.parent[v]]++] = v;
  return out;
}

NodeId lca(const RootedTree& tree, NodeId u, NodeId v) {
  while (tree.depth[u] > tree.depth[v]) u = tree.parent[u];
  while (tree.depth[v] > tree.depth[u]) v = tree.parent[v];
  while (u != v) {
    u = tree.parent[u];
    v = tree.parent[v];
  }
  return u;
}

NodeId lca_fast(const RootedTree& tree, NodeId u, NodeId v) {
  if (u == tree.root || v == tree.root) return tree.root;
  if (tree.subtree[u] != tree.subtree[v]) return tree.root;
  return lca(tree, u, v);
}

double tree_resistance(const RootedTree& tree, NodeId u, NodeId v, NodeId lca_node) {
  return tree.res_to_root[u] + tree.res_to_root[v] - 2.0 * tree.res_to_root[lca_node];
}

// Batch LCA for the whole off-tree list in one offline union-find pass over
// the tree (post-order merge of child sets, queries answered when the second
// endpoint finishes). Near-linear total instead of O(depth) per query, which
// matters because the effectiveness tree can be hundreds of levels deep.
// Answers equal lca()/lca_fast() on every query.
std::vector<NodeId> compute_lcas(const RootedTree& tree, const Graph& graph,
                                 std::span<const EdgeId> offtree, unsigned workers) {
  (void)workers;  // the offline pass is sequential and cheaper than chunked lifting
  const NodeId n = tree.node_count();
  std::vector<NodeId> lcas(offtree.size(), kInvalidNode);

  // per-node query lists (CSR), one entry per endpoint
  std::vector<std::uint32_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (EdgeId id : offtree) {
    ++offsets[graph.edge(id).u + 1];
    ++offsets[graph.edge(id).v + 1];
  }
  for (NodeId i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  struct QueryRef {
    NodeId other;
    std::uint32_t index;
  };
  std::vector<QueryRef> queries(offtree.size() * 2);
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t i = 0; i < offtree.size(); ++i) {
    const Edge& e = graph.edge(offtree[i]);
    queries[fill[e.u]++] = {e.v, i};
    queries[fill[e.v]++] = {e.u, i};
  }

  std::vector<NodeId> set_parent(n);
  std::vector<NodeId> set_anchor(n);  // highest processed node of each set
  std::vector<char> done(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    set_parent[i] = i;
    set_anchor[i] = i;
  }
  auto find = [&](NodeId x) {
    while (set_parent[x] != x) {
      set_parent[x] = set_parent[set_parent[x]];
      x = set_parent[x];
    }
    return x;
  };

  // iterative post-order: children first, then answer queries and merge into
  // the parent's set
  std::vector<std::pair<NodeId, std::uint32_t>> stack{{tree.root, 0}};
  stack.reserve(64);
  while (!stack.empty()) {
    NodeId node = stack.back().first;
    std::span<const NodeId> kids = tree.children_of(node);
    if (stack.back().second < kids.size()) {
      NodeId child = kids[stack.back().second++];
      stack.emplace_back(child, 0);
      continue;
    }
    for (std::uint32_t q = offsets[node]; q < offsets[node + 1]; ++q) {
      const QueryRef& ref = queries[q];
      if (done[ref.other]) lcas[ref.index] = set_anchor[find(ref.other)];
    }
    done[node] = 1;
    stack.pop_back();
    if (node != tree.root) {
      NodeId parent = tree.parent[node];
      set_parent[find(node)] = find(parent);
      set_anchor[find(parent)] = parent;
    }
  }
  return lcas;
}

std::vector<double> resistance_scores(const RootedTree& tree, const Graph& graph,
                                      std::span<const EdgeId> offtree,
                                      std::span<const NodeId> lcas, unsigned workers) {
  if (lcas.size() != offtree.size())
    throw std::invalid_argument("resistance_scores: lca per off-tree edge required");
  std::vector<double> scores(offtree.size());
  parallel_chunks(workers, offtree.size(), [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Edge& e = graph.edge(offtree[i]);
      scores[i] = e.w * tree_resistance(tree, e.u, e.v, lcas[i]);
    }
  });
  return scores;
}

std::vector<double> resistance_scores(const RootedTree& tree, const Graph& graph,
                                      std::span<const EdgeId> offtree, unsigned workers) {
  std::vector<NodeId> lcas = compute_lcas(tree, graph, offtree, workers);
  return resistance_scores(tree, graph, offtree, lcas, workers);
}

struct GroundedLaplacianSolver::Impl {
  Eigen::LDLT<Eigen::MatrixXd> factorization;
  NodeId n = 0;
};

GroundedLaplacianSolver::GroundedLaplacianSolver(const Graph& graph) : impl_(new Impl) {
  const NodeId n = graph.node_count();
  if (n > 2000)
    throw std::invalid_argument("GroundedLaplacianSolver: desk-scale oracle, N <= 2000");
  if (n < 1) throw std::invalid_argument("GroundedLaplacianSolver: empty graph");
  if (!graph.is_connected())
    throw std::invalid_argument("GroundedLaplacianSolver: singular system (disconnected input)");
  impl_->n = n;
  if (n == 1) return;
  // Laplacian with node 0 grounded (row/col 0 removed)
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (const Edge& e : graph.edges()) {
    if (e.u > 0) lap(e.u - 1, e.u - 1) += e.w;
    if (e.v > 0) lap(e.v - 1, e.v - 1) += e.w;
    if (e.u > 0 && e.v > 0) {
      lap(e.u - 1, e.v - 1) -= e.w;
      lap(e.v - 1, e.u - 1) -= e.w;
    }
  }
  impl_->factorization = lap.ldlt();
}

GroundedLaplacianSolver::~GroundedLaplacianSolver() { delete impl_; }
GroundedLaplacianSolver::GroundedLaplacianSolver(GroundedLaplacianSolver&& other) noexcept
    : impl_(other.impl_) {
  other.impl_ = nullptr;
}
GroundedLaplacianSolver& GroundedLaplacianSolver::operator=(
    GroundedLaplacianSolver&& other) noexcept {
  std::swap(impl_, other.impl_);
  return *this;
}

double GroundedLaplacianSolver::resistance(NodeId u, NodeId v) const {
  if (u >= impl_->n || v >= impl_->n)
    throw std::invalid_argument("GroundedLaplacianSolver: node out of range");
  if (u == v) return 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(impl_->n - 1);
  if (u > 0) rhs(u - 1) = 1.0;
  if (v > 0) rhs(v - 1) = -1.0;
  Eigen::VectorXd x = impl_->factorization.solve(rhs);
  double xu = u > 0 ? x(u - 1) : 0.0;
  double xv = v > 0 ? x(v - 1) : 0.0;
  return xu - xv;
}

double pseudo_inverse_resistance_oracle(const Graph& tree_graph, NodeId u, NodeId v) {
  return GroundedLaplacianSolver(tree_graph).resistance(u, v);
}

}  // namespace linspar
