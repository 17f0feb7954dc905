#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace linspar {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kInvalidNode = 0xFFFFFFFFu;

// Weights are conductances: larger w = stronger edge, resistance of an edge
// is 1/w.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable weighted undirected graph. Edges are stored once, normalized to
// u < v, in input order; the adjacency lists both endpoints. Construction
// validates endpoints, weights, self-loops and duplicates, and records
// connectivity. Safe for concurrent reads.
class Graph {
 public:
  struct Neighbor {
    NodeId node;
    EdgeId edge;
  };

  Graph() = default;
  Graph(NodeId n, std::vector<Edge> edges);

  NodeId node_count() const { return n_; }
  EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Neighbor> neighbors(NodeId u) const {
    return {adj_.data() + adj_offsets_[u], adj_.data() + adj_offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return adj_offsets_[u + 1] - adj_offsets_[u]; }

  bool is_connected() const { return connected_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  NodeId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<Neighbor> adj_;
  bool connected_ = true;
};

enum class GraphFormat { matrix_market, tsv };

// Format detection peeks at the first line ("%%MatrixMarket" banner).
Graph load_graph(const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path, GraphFormat format);
void save_graph(const Graph& graph, const std::filesystem::path& path, GraphFormat format);
GraphFormat format_for_path(const std::filesystem::path& path);

// Random-graph spec. Generation is a pure function of (n, m, seed): a random
// spanning tree by uniform parent attachment, then m-(n-1) distinct random
// non-tree edges, weights uniform in (0,1]. All randomness comes from the
// splitmix64 stream documented in rng.hpp, so any implementation of the same
// recipe reproduces identical graphs.
struct GenSpec {
  NodeId n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
};

Graph generate_graph(const GenSpec& spec);

}  // namespace linspar
