#pragma once

// Shared test fixtures and helpers.

#include <numeric>
#include <random>
#include <vector>

#include "linspar/bfs.hpp"
#include "linspar/graph.hpp"
#include "linspar/marking.hpp"
#include "linspar/sortkit.hpp"
#include "linspar/tree.hpp"

namespace testutil {

using namespace linspar;

// Six-node fixture used across the module tests: a fixed spanning tree
// (unit weights, rooted at 0) plus three off-tree edges
//   f1=(3,5), f2=(4,5), f3=(3,4).
// Tree edge ids 0..4, off-tree ids 5..7. Depths are [0,1,1,2,2,2]; the
// subtree under child 1 has index 0 and the subtree under child 2 index 1.
struct SixNodeFixture {
  Graph graph;
  RootedTree tree;
  std::vector<EdgeId> tree_ids{0, 1, 2, 3, 4};
  std::vector<EdgeId> offtree_ids{5, 6, 7};

  SixNodeFixture()
      : graph(6, {{0, 1, 1.0},
                  {0, 2, 1.0},
                  {1, 3, 1.0},
                  {1, 4, 1.0},
                  {2, 5, 1.0},
                  {3, 5, 1.0},
                  {4, 5, 1.0},
                  {3, 4, 1.0}}) {
    tree = root_tree(graph, tree_ids, 0);
  }

  // records in resistance order: f1, f2 (score 4), then f3 (score 2)
  std::vector<EdgeRecord> records() const {
    std::vector<NodeId> lcas = compute_lcas(tree, graph, offtree_ids);
    std::vector<double> scores = resistance_scores(tree, graph, offtree_ids, lcas);
    std::vector<std::uint32_t> order = sorted_order(scores);
    return build_records(graph, offtree_ids, lcas, scores, order);
  }

  static std::vector<std::uint32_t> sorted_order(const std::vector<double>& scores) {
    std::vector<SortItem> items(scores.size());
    for (std::uint32_t i = 0; i < scores.size(); ++i) items[i] = {scores[i], i};
    std::vector<SortItem> sorted = drain(parallel_sort(std::move(items), 1),
                                         SortDirection::descending);
    std::vector<std::uint32_t> order(sorted.size());
    for (std::uint32_t i = 0; i < sorted.size(); ++i) order[i] = sorted[i].payload;
    return order;
  }
};

// Records for an arbitrary graph + tree in resistance-descending order
// (ties ascending id), the processing order of the marking stages.
inline std::vector<EdgeRecord> records_for(const Graph& graph, const RootedTree& tree,
                                           const std::vector<EdgeId>& offtree) {
  std::vector<NodeId> lcas = compute_lcas(tree, graph, offtree);
  std::vector<double> scores = resistance_scores(tree, graph, offtree, lcas);
  std::vector<std::uint32_t> order = SixNodeFixture::sorted_order(scores);
  return build_records(graph, offtree, lcas, scores, order);
}

// Random connected graph via the deterministic generator, with the
// generator's own spanning tree (the first n-1 edges) rooted by graph
// degree. Handy when a test needs a tree + off-tree split but the tree
// shape itself does not matter.
struct RandomInstance {
  Graph graph;
  RootedTree tree;
  std::vector<EdgeId> tree_ids;
  std::vector<EdgeId> offtree_ids;
};

inline RandomInstance random_instance(NodeId n, std::uint64_t m, std::uint64_t seed) {
  RandomInstance inst;
  inst.graph = generate_graph(GenSpec{n, m, seed});
  inst.tree_ids.resize(n - 1);
  std::iota(inst.tree_ids.begin(), inst.tree_ids.end(), 0);
  inst.offtree_ids.resize(m - (n - 1));
  std::iota(inst.offtree_ids.begin(), inst.offtree_ids.end(), n - 1);
  inst.tree = root_tree(inst.graph, inst.tree_ids, select_root(inst.graph));
  return inst;
}

}  // namespace testutil
