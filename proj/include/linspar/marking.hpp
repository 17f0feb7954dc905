#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "linspar/bitset.hpp"
#include "linspar/graph.hpp"
#include "linspar/tree.hpp"

namespace linspar {

// One off-tree edge as seen by the marking stages, in resistance-sorted
// order. Token/bitmap indices everywhere refer to the POSITION of a record
// in the sorted span, not to the original graph edge id.
struct EdgeRecord {
  EdgeId id = 0;
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;
  NodeId lca = 0;
  double resistance_score = 0.0;
  bool is_crossing = false;
  bool is_marked = false;
  bool is_enforced = false;
  bool is_withdrawn = false;
  bool is_selected = false;
};

// Records for `offtree[order[i]]`, i.e. the off-tree edges permuted into
// processing order (normally resistance descending, ties by ascending id).
std::vector<EdgeRecord> build_records(const Graph& graph, std::span<const EdgeId> offtree,
                                      std::span<const NodeId> lcas,
                                      std::span<const double> scores,
                                      std::span<const std::uint32_t> order);

// Coverage radius around a selected edge's endpoints. General form clamps to
// at least 1; the crossing form drops the clamp (it is >= 1 automatically
// because neither endpoint is the LCA).
std::uint32_t compute_beta(const RootedTree& tree, NodeId u, NodeId v, NodeId lca_node,
                           bool crossing);

struct CoverageBall {
  NodeId center = 0;
  std::uint32_t radius = 0;
  std::vector<NodeId> nodes;
};

// Nodes within `beta` tree hops of `center` (BFS over tree edges only).
CoverageBall coverage_ball(const RootedTree& tree, NodeId center, std::uint32_t beta);

enum class MarkSide : std::uint8_t { first = 1, second = 2 };

// Mark-token storage for the linear checking schemes, bitmap-backed over the
// off-tree position universe. Two families live here: per-node side-tagged
// token sets for the all-edge scheme, and per-(lca,node) untagged sets for
// the crossing-edge scheme whose membership test is a word-parallel AND.
// Slots are allocated lazily on first write. Desk-scale by design: the
// production parallel path keeps bucket-local stores instead (see
// partition.hpp) and the recovery pass keeps sorted token lists.
class MarkStore {
 public:
  explicit MarkStore(std::uint32_t off_tree_count) : universe_(off_tree_count) {}

  std::uint32_t universe() const { return universe_; }

  // all-edge scheme
  void add_token(NodeId node, std::uint32_t position, MarkSide side);
  bool has_token(NodeId node, std::uint32_t position, MarkSide side) const;
  bool check_pair(NodeId u, NodeId v) const;

  // crossing scheme
  void add_crossing(NodeId lca_node, NodeId node, std::uint32_t position);
  bool crossing_has(NodeId lca_node, NodeId node, std::uint32_t position) const;
  bool crossing_intersects(NodeId lca_node, NodeId u, NodeId v) const;
  std::vector<std::uint32_t> crossing_intersection(NodeId lca_node, NodeId u, NodeId v) const;

 private:
  const DenseBitset* find(const std::unordered_map<std::uint64_t, DenseBitset>& map,
                          std::uint64_t key) const;
  DenseBitset& slot(std::unordered_map<std::uint64_t, DenseBitset>& map, std::uint64_t key);

  std::uint32_t universe_;
  std::unordered_map<std::uint64_t, DenseBitset> tokens_;    // (node, side)
  std::unordered_map<std::uint64_t, DenseBitset> crossing_;  // (lca, node)
};

// Marks `records[position]` into the all-edge store: side-1 tokens on the
// ball around u, side-2 tokens on the ball around v, clamped beta.
void mark_linear(MarkStore& store, const RootedTree& tree, std::span<const EdgeRecord> records,
                 std::uint32_t position);

// true iff some stored edge covers (u,v) in either orientation
bool check_linear(const MarkStore& store, NodeId u, NodeId v);

// Crossing-edge marking: the position lands untagged in M_{lca,x} for every
// x in either ball, unclamped beta. Rejects non-crossing records.
void mark_crossing(MarkStore& store, const RootedTree& tree, std::span<const EdgeRecord> records,
                   std::uint32_t position);

// Crossing-edge mark check. Fast path (neither endpoint is the LCA): the
// (lca,u) and (lca,v) bitmaps intersect. Slow path (checked edge is
// non-crossing): an intersecting token must additionally pass the explicit
// ball-coverage test.
bool check_crossing(const MarkStore& store, const RootedTree& tree,
                    std::span<const EdgeRecord> records, NodeId u, NodeId v, NodeId lca_node);

// does records[position] cover the pair (x,y)? `crossing_beta` selects the
// unclamped radius.
bool edge_covers(const RootedTree& tree, const EdgeRecord& record, NodeId x, NodeId y,
                 bool crossing_beta);

struct MarkOutcome {
  std::vector<char> selected;
  std::vector<char> marked;
};

// Reference semantics, desk scale: walk the records in order; an unmarked
// record is selected and marks every off-tree edge whose endpoints fall in
// opposite coverage balls.
MarkOutcome naive_mark_all(const RootedTree& tree, std::span<const EdgeRecord> records);

// Sequential crossing stage over a shared MarkStore: crossing records are
// checked (fast path) and, when unmarked, selected and marked. Non-crossing
// records are left undecided for the recovery pass.
void crossing_stage_sequential(MarkStore& store, std::span<EdgeRecord> records,
                               const RootedTree& tree);

// Recovery pass after the crossing stage. Sweeps the records in order,
// deciding non-crossing edges and re-checking any edge whose flags make its
// state suspect against the edges actually selected so far; a flip, and
// every selected non-crossing edge, pushes isEnforced/isWithdrawn onto the
// edges it covers, which schedules them for re-checking on a later sweep.
// Sweeps repeat until none flips (capped; two is the norm). A final pass
// recomputes every isMarked flag against the converged selection so the
// output equals naive_mark_all exactly, selection and flags both.
// Returns the selected positions in processing order.
//
// `crossing_stage_coverage` (from run_marking_parallel) is reused for the
// final flags of every LCA group whose selection survived recovery
// unchanged; only perturbed groups are re-walked.
std::vector<std::uint32_t> recover_noncrossing(
    std::span<EdgeRecord> records, const RootedTree& tree,
    const std::vector<char>* crossing_stage_coverage = nullptr);

}  // namespace linspar
