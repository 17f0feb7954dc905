#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "linspar/graph.hpp"

namespace linspar {

// Unweighted hop distances from a root. On a connected graph every level is
// finite and no edge spans more than one level.
struct BfsLevels {
  NodeId root = 0;
  std::vector<std::uint32_t> level;
};

// Deterministic root rule for the pipeline: maximum degree, ties to the
// lowest node id.
NodeId select_root(const Graph& graph);

BfsLevels bfs(const Graph& graph, NodeId root);

// Level-synchronous parallel BFS. Workers claim slices of the current
// frontier, claim unvisited neighbors with a compare-and-set on the level
// array (a node enters at most one frontier), aggregate next-layer nodes
// locally, and publish them with one atomic counter bump per batch. A
// barrier separates layers. The level array always equals bfs() exactly;
// only the frontier order is schedule-dependent.
//
// `expansions`, when given, counts frontier pops across all workers (test
// instrumentation; equals N on a connected graph).
BfsLevels bfs_parallel(const Graph& graph, NodeId root, unsigned workers,
                       std::atomic<std::uint64_t>* expansions = nullptr);

// score(e=(u,v)) = w(e) * (level[u] + level[v] + 1)
double default_effectiveness(double w, std::uint32_t level_u, std::uint32_t level_v);

using EffectivenessFormula = double (*)(double w, std::uint32_t level_u, std::uint32_t level_v);

std::vector<double> effectiveness_scores(const Graph& graph, const BfsLevels& levels,
                                         EffectivenessFormula formula = default_effectiveness);

}  // namespace linspar
