#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "linspar/bfs.hpp"
#include "linspar/graph.hpp"
#include "linspar/partition.hpp"
#include "linspar/tree.hpp"

namespace linspar {

struct PipelineConfig {
  unsigned workers = 1;
  TreeDirection tree_direction = TreeDirection::max;
  std::optional<std::uint64_t> budget;  // max selected off-tree edges
  std::uint64_t seed = 0;               // used by verification sampling
  std::optional<std::string> report_path;
  DispatchMode dispatch = DispatchMode::greedy;
};

struct StageReport {
  double eff_ms = 0, mst_ms = 0, lca_ms = 0, res_ms = 0, mark_ms = 0, sort_ms = 0, total_ms = 0;
  NodeId n = 0;
  EdgeId l = 0;
  std::uint64_t selected = 0;
};

// Spanning tree plus the selected off-tree edges, original weights kept.
// Both sections are listed in ascending (u,v).
struct Sparsifier {
  std::vector<EdgeId> tree_edge_ids;
  std::vector<EdgeId> selected_edge_ids;
  std::vector<Edge> tree_edges;
  std::vector<Edge> selected_edges;
};

struct SparsifyResult {
  Sparsifier sparsifier;
  StageReport report;
};

// Full pipeline: BFS + effectiveness, effectiveness sort, spanning tree and
// rooting, off-tree LCA + resistance (partitioned across workers),
// resistance sort (top-K merged when a budget is set), bucketed crossing
// marking, sequential recovery, selection. Output is identical for every
// worker count.
SparsifyResult sparsify(const Graph& graph, const PipelineConfig& config);

void save_sparsifier(const Sparsifier& sparsifier, const std::filesystem::path& path,
                     GraphFormat format);

void write_report_json(const StageReport& report, const std::filesystem::path& path);

struct VerifyReport {
  bool selection_match = false;
  std::uint64_t pipeline_selected = 0;
  std::uint64_t oracle_selected = 0;
  std::optional<EdgeId> first_mismatch;  // original edge id
  double max_resistance_rel_err = 0.0;
  std::size_t resistance_samples = 0;
};

// Differential check against the reference path: the naive marking oracle
// for the selected set, and the grounded-Laplacian solve for spot-checked
// tree resistances. Desk scale (N <= 2000). `corrupt_edge` is a test hook
// that flips one edge's membership in the pipeline selection before
// comparison.
VerifyReport verify(const Graph& graph, const PipelineConfig& config,
                    std::optional<EdgeId> corrupt_edge = std::nullopt);

struct BenchRow {
  NodeId n = 0;
  std::uint64_t m = 0;
  unsigned workers = 1;
  unsigned trials = 0;
  StageReport median;  // stage columns come from the median-total trial
};

std::vector<BenchRow> bench(const std::vector<std::pair<NodeId, std::uint64_t>>& sizes,
                            unsigned trials, const std::vector<unsigned>& workers_list,
                            std::uint64_t seed);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace linspar
