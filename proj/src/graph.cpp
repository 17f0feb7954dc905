#include "linspar/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "linspar/rng.hpp"

namespace linspar {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

Graph::Graph(NodeId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge& e = edges_[i];
    if (e.u >= n_ || e.v >= n_) fail("edge " + std::to_string(i) + ": endpoint out of range");
    if (e.u == e.v) fail("edge " + std::to_string(i) + ": self-loop");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      fail("edge " + std::to_string(i) + ": weight must be positive and finite");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.insert(pair_key(e.u, e.v)).second)
      fail("edge " + std::to_string(i) + ": duplicate edge (" + std::to_string(e.u) + "," +
           std::to_string(e.v) + ")");
  }

  adj_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const Edge& e : edges_) {
    ++adj_offsets_[e.u + 1];
    ++adj_offsets_[e.v + 1];
  }
  for (NodeId i = 0; i < n_; ++i) adj_offsets_[i + 1] += adj_offsets_[i];
  adj_.resize(edges_.size() * 2);
  std::vector<std::uint32_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    adj_[cursor[e.u]++] = Neighbor{e.v, id};
    adj_[cursor[e.v]++] = Neighbor{e.u, id};
  }

  // connectivity scan
  if (n_ > 0) {
    std::vector<NodeId> stack{0};
    std::vector<bool> visited(n_, false);
    visited[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : neighbors(u)) {
        if (!visited[nb.node]) {
          visited[nb.node] = true;
          ++reached;
          stack.push_back(nb.node);
        }
      }
    }
    connected_ = reached == n_;
  }
}

GraphFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".mtx" ? GraphFormat::matrix_market : GraphFormat::tsv;
}

namespace {

Graph parse_tsv(std::istream& in) {
  std::vector<Edge> edges;
  NodeId max_node = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream fields(line);
    long long u, v;
    double w;
    if (!(fields >> u >> v >> w))
      fail("tsv line " + std::to_string(lineno) + ": expected 'u v w'");
    if (u < 0 || v < 0) fail("tsv line " + std::to_string(lineno) + ": negative node id");
    edges.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), w});
    max_node = std::max({max_node, static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  NodeId n = edges.empty() ? 0 : max_node + 1;
  return Graph(n, std::move(edges));
}

Graph parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("matrix market: empty file");
  if (line.rfind("%%MatrixMarket", 0) != 0) fail("matrix market: missing banner");
  std::istringstream banner(line);
  std::string tag, object, fmt, field, symmetry;
  banner >> tag >> object >> fmt >> field >> symmetry;
  if (object != "matrix" || fmt != "coordinate" || field != "real")
    fail("matrix market: expected 'matrix coordinate real'");
  if (symmetry != "general" && symmetry != "symmetric")
    fail("matrix market: expected general or symmetric");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  long long rows, cols, nnz;
  if (!(dims >> rows >> cols >> nnz)) fail("matrix market: bad size line");
  if (rows != cols) fail("matrix market: expected a square matrix");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) fail("matrix market: truncated entry list");
    std::istringstream entry(line);
    long long i, j;
    double w;
    if (!(entry >> i >> j >> w)) fail("matrix market: bad entry on line " + std::to_string(k));
    if (i < 1 || j < 1 || i > rows || j > rows) fail("matrix market: index out of range");
    // 1-indexed on disk, 0-indexed in memory
    edges.push_back(Edge{static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1), w});
  }
  return Graph(static_cast<NodeId>(rows), std::move(edges));
}

void write_weight(std::string& out, double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  out += buf;
}

}  // namespace

Graph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  return format == GraphFormat::matrix_market ? parse_matrix_market(in) : parse_tsv(in);
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream probe(path);
  if (!probe) fail("cannot open " + path.string());
  std::string first;
  std::getline(probe, first);
  probe.close();
  GraphFormat format = first.rfind("%%MatrixMarket", 0) == 0 ? GraphFormat::matrix_market
                                                             : GraphFormat::tsv;
  return load_graph(path, format);
}

void save_graph(const Graph& graph, const std::filesystem::path& path, GraphFormat format) {
  std::string out;
  if (format == GraphFormat::matrix_market) {
    out += "%%MatrixMarket matrix coordinate real symmetric\n";
    out += std::to_string(graph.node_count()) + " " + std::to_string(graph.node_count()) + " " +
           std::to_string(graph.edge_count()) + "\n";
    for (const Edge& e : graph.edges()) {
      // lower triangle: row index is the larger endpoint
      out += std::to_string(e.v + 1) + " " + std::to_string(e.u + 1) + " ";
      write_weight(out, e.w);
      out += "\n";
    }
  } else {
    for (const Edge& e : graph.edges()) {
      out += std::to_string(e.u) + " " + std::to_string(e.v) + " ";
      write_weight(out, e.w);
      out += "\n";
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail("cannot write " + path.string());
  file << out;
}

Graph generate_graph(const GenSpec& spec) {
  if (spec.n == 0) fail("generate_graph: n must be positive");
  std::uint64_t tree_edges = spec.n - 1;
  if (spec.m < tree_edges) fail("generate_graph: m < n-1");
  std::uint64_t max_edges = static_cast<std::uint64_t>(spec.n) * (spec.n - 1) / 2;
  if (spec.m > max_edges) fail("generate_graph: m exceeds n(n-1)/2");

  SplitMix64 rng(spec.seed);
  std::vector<Edge> edges;
  edges.reserve(spec.m);
  std::unordered_set<std::uint64_t> used;
  used.reserve(spec.m * 2);

  // spanning tree by random parent attachment: node i hangs off a uniform
  // node in [0, i)
  for (NodeId i = 1; i < spec.n; ++i) {
    NodeId parent = static_cast<NodeId>(rng.next_below(i));
    double w = rng.next_weight();
    edges.push_back(Edge{parent, i, w});
    used.insert(pair_key(parent, i));
  }
  // distinct random non-tree edges
  while (edges.size() < spec.m) {
    NodeId u = static_cast<NodeId>(rng.next_below(spec.n));
    NodeId v = static_cast<NodeId>(rng.next_below(spec.n));
    if (u == v) continue;
    if (!used.insert(pair_key(u, v)).second) continue;
    double w = rng.next_weight();
    edges.push_back(Edge{u, v, w});
  }
  return Graph(spec.n, std::move(edges));
}

}  // namespace linspar
