#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"

using namespace linspar;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

}  // namespace

TEST_CASE("construction validates endpoints, loops, weights, duplicates") {
  CHECK_NOTHROW(Graph(2, {{0, 1, 1.0}}));
  CHECK_THROWS(Graph(2, {{0, 0, 1.0}}));               // self-loop
  CHECK_THROWS(Graph(2, {{0, 2, 1.0}}));               // out of range
  CHECK_THROWS(Graph(2, {{0, 1, 0.0}}));               // non-positive
  CHECK_THROWS(Graph(2, {{0, 1, -1.0}}));
  CHECK_THROWS(Graph(2, {{0, 1, std::nan("")}}));
  CHECK_THROWS(Graph(2, {{0, 1, 1.0 / 0.0}}));
  CHECK_THROWS(Graph(3, {{0, 1, 1.0}, {1, 0, 2.0}}));  // duplicate, reversed
}

TEST_CASE("edges are normalized and adjacency lists both endpoints") {
  Graph g(3, {{2, 0, 0.5}, {1, 2, 2.0}});
  CHECK(g.edge(0).u == 0);
  CHECK(g.edge(0).v == 2);
  CHECK(g.degree(2) == 2);
  CHECK(g.degree(0) == 1);
  std::size_t degree_sum = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) degree_sum += g.degree(u);
  CHECK(degree_sum == 2 * g.edge_count());
  CHECK(g.is_connected());
  Graph disconnected(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_FALSE(disconnected.is_connected());
}

TEST_CASE("tsv loading") {
  auto path = temp_file("linspar_fixture.tsv");
  write_file(path,
             "# six node fixture\n"
             "0 1 1\n0 2 1\n1 3 1\n1 4 1\n2 5 1\n3 5 1\n4 5 1\n3 4 1\n");
  Graph g = load_graph(path);
  CHECK(g.node_count() == 6);
  CHECK(g.edge_count() == 8);

  write_file(path, "0 1 1.0\n");
  Graph single = load_graph(path);
  CHECK(single.node_count() == 2);
  CHECK(single.edge_count() == 1);

  write_file(path, "0 0 1.0\n");
  CHECK_THROWS(load_graph(path));  // self-loop

  write_file(path, "0 1\n");
  CHECK_THROWS(load_graph(path));  // missing weight
}

TEST_CASE("matrix market loading shifts 1-based ids") {
  auto path = temp_file("linspar_fixture.mtx");
  write_file(path,
             "%%MatrixMarket matrix coordinate real general\n"
             "% comment\n"
             "3 3 2\n"
             "1 2 1.5\n"
             "3 2 2.5\n");
  Graph g = load_graph(path);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.edge(0).u == 0);
  CHECK(g.edge(0).v == 1);
  CHECK(g.edge(1).w == 2.5);

  write_file(path,
             "%%MatrixMarket matrix coordinate real general\n"
             "3 3 2\n"
             "1 2 1.5\n"
             "2 1 2.5\n");
  CHECK_THROWS(load_graph(path));  // (1,2) and (2,1) are the same edge

  write_file(path, "%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
  CHECK_THROWS(load_graph(path));
}

TEST_CASE("save/load round-trips exactly in both formats") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    NodeId n = static_cast<NodeId>(2 + rng() % 60);
    std::uint64_t max_m = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::uint64_t m = n - 1 + rng() % (max_m - (n - 1) + 1);
    Graph g = generate_graph(GenSpec{n, m, rng()});

    for (GraphFormat format : {GraphFormat::tsv, GraphFormat::matrix_market}) {
      auto path = temp_file(format == GraphFormat::tsv ? "rt.tsv" : "rt.mtx");
      save_graph(g, path, format);
      Graph loaded = load_graph(path);
      CHECK(loaded == g);
    }
  }
}

TEST_CASE("generator determinism and validity") {
  Graph a = generate_graph(GenSpec{1000, 4000, 7});
  Graph b = generate_graph(GenSpec{1000, 4000, 7});
  CHECK(a == b);
  CHECK(a.node_count() == 1000);
  CHECK(a.edge_count() == 4000);
  CHECK(a.is_connected());

  Graph c = generate_graph(GenSpec{1000, 4000, 8});
  CHECK_FALSE(c == a);

  // single feasible topology
  Graph tiny = generate_graph(GenSpec{2, 1, 42});
  CHECK(tiny.edge_count() == 1);
  CHECK(tiny.edge(0).u == 0);
  CHECK(tiny.edge(0).v == 1);
  CHECK(tiny.edge(0).w > 0.0);
  CHECK(tiny.edge(0).w <= 1.0);

  CHECK_THROWS(generate_graph(GenSpec{5, 3, 1}));  // m < n-1
  CHECK_THROWS(generate_graph(GenSpec{4, 7, 1}));  // m > n(n-1)/2
  CHECK_THROWS(generate_graph(GenSpec{0, 0, 1}));
}

TEST_CASE("generated weights stay in (0,1]") {
  Graph g = generate_graph(GenSpec{200, 600, 3});
  for (const Edge& e : g.edges()) {
    CHECK(e.w > 0.0);
    CHECK(e.w <= 1.0);
  }
}
