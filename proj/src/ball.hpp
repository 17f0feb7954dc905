#pragma once

// Internal scratch structures shared by the marking stages. Not installed.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "linspar/tree.hpp"

namespace linspar::detail {

// Truncated BFS over tree edges with epoch-stamped membership. `nodes` holds
// the most recent ball with hop distances carried in the queue entries;
// stamps stay valid until the next fill, so membership of older balls can be
// tested by keeping the returned epoch.
struct BallScratch {
  struct Visit {
    NodeId node;
    std::uint32_t hops;
  };
  std::vector<std::uint32_t> stamp;
  std::vector<Visit> nodes;
  std::uint32_t epoch = 0;

  explicit BallScratch(NodeId n) : stamp(n, 0) {}

  std::uint32_t fill(const RootedTree& tree, NodeId center, std::uint32_t beta) {
    ++epoch;
    nodes.clear();
    nodes.push_back({center, 0});
    stamp[center] = epoch;
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      Visit visit = nodes[head];
      if (visit.hops == beta) continue;
      NodeId x = visit.node;
      std::uint32_t next = visit.hops + 1;
      NodeId parent = tree.parent[x];
      if (parent != x && stamp[parent] != epoch) {
        stamp[parent] = epoch;
        nodes.push_back({parent, next});
      }
      for (NodeId child : tree.children_of(x)) {
        if (stamp[child] != epoch) {
          stamp[child] = epoch;
          nodes.push_back({child, next});
        }
      }
    }
    return epoch;
  }

  bool contains(NodeId x, std::uint32_t ball_epoch) const { return stamp[x] == ball_epoch; }
};

// Per-node coverage bitmaps over the first kMaskBits selected edges of a
// group; the covered test is a word-parallel AND. Epoch stamps make clearing
// free. Groups that select more edges than the mask width fall back to
// direct cover propagation (see push_covered_edges), which costs more walk
// but never grows per-node state.
struct GroupMaskStore {
  static constexpr std::uint32_t kMaskWords = 4;
  static constexpr std::uint32_t kMaskBits = kMaskWords * 64;

  std::vector<std::uint64_t> words;
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::uint32_t selected = 0;

  explicit GroupMaskStore(NodeId n)
      : words(static_cast<std::size_t>(n) * kMaskWords, 0), stamp(n, 0) {}

  void begin_group() {
    ++epoch;
    selected = 0;
  }

  bool mask_full() const { return selected >= kMaskBits; }

  // marks node x as covered by the group's next selected edge
  void add(NodeId x) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(x) * kMaskWords;
    if (stamp[x] != epoch) {
      stamp[x] = epoch;
      for (std::uint32_t w = 0; w < kMaskWords; ++w) row[w] = 0;
    }
    row[selected >> 6] |= std::uint64_t{1} << (selected & 63);
  }

  void commit_selected() { ++selected; }

  bool covered(NodeId u, NodeId v) const {
    if (stamp[u] != epoch || stamp[v] != epoch) return false;
    const std::uint64_t* a = words.data() + static_cast<std::size_t>(u) * kMaskWords;
    const std::uint64_t* b = words.data() + static_cast<std::size_t>(v) * kMaskWords;
    std::uint64_t hit = 0;
    for (std::uint32_t w = 0; w < kMaskWords; ++w) hit |= a[w] & b[w];
    return hit != 0;
  }
};

// node -> (other endpoint, record position, caller-chosen group tag) over a
// span of off-tree records; the tag lets cover propagation filter probes to
// the group being processed without touching the records array.
struct TaggedIncidence {
  struct Entry {
    NodeId other;
    std::uint32_t position;
    std::uint32_t tag;
  };
  std::vector<std::uint32_t> offsets;
  std::vector<Entry> entries;

  template <class Records>
  TaggedIncidence(NodeId n, const Records& records, std::span<const std::uint32_t> tags) {
    offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& r : records) {
      ++offsets[r.u + 1];
      ++offsets[r.v + 1];
    }
    for (NodeId i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    entries.resize(records.size() * 2);
    std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t pos = 0; pos < records.size(); ++pos) {
      const auto& r = records[pos];
      std::uint32_t tag = tags.empty() ? 0 : tags[pos];
      entries[fill[r.u]++] = {r.v, pos, tag};
      entries[fill[r.v]++] = {r.u, pos, tag};
    }
  }

  std::span<const Entry> at(NodeId x) const {
    return {entries.data() + offsets[x], entries.data() + offsets[x + 1]};
  }
};

// Incidence restricted to one group's records, rebuilt in place per group.
// Worth the O(n) offset reset for groups big enough to outgrow the coverage
// masks: probe loops then touch nothing but the group's own edges.
struct LocalIncidence {
  struct Entry {
    NodeId other;
    std::uint32_t position;
  };
  std::vector<std::uint32_t> offsets;
  std::vector<Entry> entries;

  explicit LocalIncidence(NodeId n) : offsets(static_cast<std::size_t>(n) + 1) {}

  template <class Records>
  void build(const Records& records, std::span<const std::uint32_t> positions) {
    std::fill(offsets.begin(), offsets.end(), 0);
    for (std::uint32_t pos : positions) {
      ++offsets[records[pos].u + 1];
      ++offsets[records[pos].v + 1];
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    entries.resize(positions.size() * 2);
    std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t pos : positions) {
      const auto& r = records[pos];
      entries[fill[r.u]++] = {r.v, pos};
      entries[fill[r.v]++] = {r.u, pos};
    }
  }

  std::span<const Entry> at(NodeId x) const {
    return {entries.data() + offsets[x], entries.data() + offsets[x + 1]};
  }
};

// matches every tag in push_covered_edges
inline constexpr std::uint32_t kAnyTag = 0xFFFFFFFFu;

// Direct cover propagation: the balls around (u,v) of `beta` hops are walked
// once and every incident off-tree edge with the wanted tag whose endpoints
// land in opposite balls is reported. Equivalent to testing the edge against
// a token store, but with O(ball volume * incident degree) work and no
// per-node state.
template <class Sink>
void push_covered_edges(const RootedTree& tree, NodeId u, NodeId v, std::uint32_t beta,
                        std::uint32_t tag, const TaggedIncidence& incidence,
                        BallScratch& scratch_u, BallScratch& scratch_v, Sink&& sink) {
  std::uint32_t eu = scratch_u.fill(tree, u, beta);
  std::uint32_t ev = scratch_v.fill(tree, v, beta);
  for (const BallScratch::Visit& visit : scratch_u.nodes) {
    for (const auto& entry : incidence.at(visit.node)) {
      if ((tag == kAnyTag || entry.tag == tag) && scratch_v.contains(entry.other, ev))
        sink(entry.position);
    }
  }
  for (const BallScratch::Visit& visit : scratch_v.nodes) {
    for (const auto& entry : incidence.at(visit.node)) {
      if ((tag == kAnyTag || entry.tag == tag) && scratch_u.contains(entry.other, eu))
        sink(entry.position);
    }
  }
}

template <class Sink>
void push_covered_edges(const RootedTree& tree, NodeId u, NodeId v, std::uint32_t beta,
                        const LocalIncidence& incidence, BallScratch& scratch_u,
                        BallScratch& scratch_v, Sink&& sink) {
  std::uint32_t eu = scratch_u.fill(tree, u, beta);
  std::uint32_t ev = scratch_v.fill(tree, v, beta);
  for (const BallScratch::Visit& visit : scratch_u.nodes) {
    for (const auto& entry : incidence.at(visit.node)) {
      if (scratch_v.contains(entry.other, ev)) sink(entry.position);
    }
  }
  for (const BallScratch::Visit& visit : scratch_v.nodes) {
    for (const auto& entry : incidence.at(visit.node)) {
      if (scratch_u.contains(entry.other, eu)) sink(entry.position);
    }
  }
}

}  // namespace linspar::detail
