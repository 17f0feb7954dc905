#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"

using namespace linspar;
using testutil::SixNodeFixture;
using testutil::random_instance;
using testutil::records_for;

namespace {

// linear pipeline over a prepared record list: crossing stage + recovery
std::vector<std::uint32_t> linear_pipeline(std::vector<EdgeRecord>& records,
                                           const RootedTree& tree) {
  MarkStore store(static_cast<std::uint32_t>(records.size()));
  crossing_stage_sequential(store, records, tree);
  return recover_noncrossing(records, tree);
}

}  // namespace

TEST_CASE("compute_beta: clamp in the general form only") {
  // chain 0-1-2-3 with a branch 1-4: u=3 depth 3, v=4 depth 2, lca=1 depth 1
  Graph g(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {1, 4, 1.0}});
  RootedTree tree = root_tree(g, std::vector<EdgeId>{0, 1, 2, 3}, 0);
  CHECK(compute_beta(tree, 3, 4, 1, false) == 1);
  CHECK(compute_beta(tree, 3, 4, 1, true) == 1);

  // non-crossing (lca == v): raw drop is 0, clamps to 1
  CHECK(compute_beta(tree, 2, 1, 1, false) == 1);

  SixNodeFixture fx;
  CHECK(compute_beta(fx.tree, 3, 5, 0, false) == 2);
  CHECK(compute_beta(fx.tree, 3, 5, 0, true) == 2);
}

TEST_CASE("coverage balls on the fixture") {
  SixNodeFixture fx;
  auto sorted_nodes = [](CoverageBall ball) {
    std::sort(ball.nodes.begin(), ball.nodes.end());
    return ball.nodes;
  };
  CHECK(sorted_nodes(coverage_ball(fx.tree, 3, 2)) == std::vector<NodeId>{0, 1, 3, 4});
  CHECK(sorted_nodes(coverage_ball(fx.tree, 5, 2)) == std::vector<NodeId>{0, 2, 5});
  CHECK(coverage_ball(fx.tree, 4, 0).nodes == std::vector<NodeId>{4});
}

TEST_CASE("coverage ball members are exactly the nodes within beta tree hops") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 30; ++round) {
    NodeId n = static_cast<NodeId>(2 + rng() % 120);
    auto inst = random_instance(n, n - 1, rng());
    NodeId center = static_cast<NodeId>(rng() % n);
    std::uint32_t beta = static_cast<std::uint32_t>(rng() % 5);
    CoverageBall ball = coverage_ball(inst.tree, center, beta);
    std::set<NodeId> members(ball.nodes.begin(), ball.nodes.end());
    CHECK(members.count(center) == 1);
    for (NodeId x = 0; x < n; ++x) {
      NodeId meet = lca(inst.tree, center, x);
      std::uint32_t dist =
          inst.tree.depth[center] + inst.tree.depth[x] - 2 * inst.tree.depth[meet];
      CHECK(members.count(x) == (dist <= beta ? 1u : 0u));
    }
  }
}

TEST_CASE("naive marking trace on the fixture") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == 5);  // (3,5), score 4
  CHECK(records[1].id == 6);  // (4,5), score 4, later id
  CHECK(records[2].id == 7);  // (3,4), score 2

  MarkOutcome outcome = naive_mark_all(fx.tree, records);
  CHECK(outcome.selected == std::vector<char>{1, 0, 1});
  CHECK(outcome.marked == std::vector<char>{1, 1, 1});  // every edge self-covers here
}

TEST_CASE("naive marking degenerate inputs") {
  SixNodeFixture fx;
  CHECK(naive_mark_all(fx.tree, {}).selected.empty());

  std::vector<EdgeRecord> one = fx.records();
  one.resize(1);
  MarkOutcome outcome = naive_mark_all(fx.tree, one);
  CHECK(outcome.selected == std::vector<char>{1});  // nothing can mark a lone edge
}

TEST_CASE("mark_linear / check_linear on the fixture") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  MarkStore store(3);
  mark_linear(store, fx.tree, records, 0);  // (3,5), beta 2

  for (NodeId x : {3u, 1u, 4u, 0u}) CHECK(store.has_token(x, 0, MarkSide::first));
  for (NodeId y : {5u, 2u, 0u}) CHECK(store.has_token(y, 0, MarkSide::second));
  CHECK_FALSE(store.has_token(5, 0, MarkSide::first));

  CHECK(check_linear(store, 4, 5));
  CHECK(check_linear(store, 5, 4));  // orientation-free
  CHECK_FALSE(check_linear(store, 3, 4));

  // idempotent set semantics
  mark_linear(store, fx.tree, records, 0);
  CHECK(check_linear(store, 4, 5));
  CHECK_FALSE(check_linear(store, 3, 4));
}

TEST_CASE("check_linear on an empty store") {
  MarkStore store(4);
  CHECK_FALSE(check_linear(store, 0, 1));
}

TEST_CASE("check_linear equals brute-force coverage by selected edges") {
  std::mt19937_64 rng(47);
  for (int round = 0; round < 40; ++round) {
    NodeId n = static_cast<NodeId>(4 + rng() % 40);
    std::uint64_t m = std::min<std::uint64_t>(n - 1 + 1 + rng() % n,
                                              static_cast<std::uint64_t>(n) * (n - 1) / 2);
    auto inst = random_instance(n, m, rng());
    std::vector<EdgeRecord> records = records_for(inst.graph, inst.tree, inst.offtree_ids);

    MarkStore store(static_cast<std::uint32_t>(records.size()));
    std::vector<std::uint32_t> chosen;
    for (std::uint32_t pos = 0; pos < records.size(); ++pos) {
      if (rng() % 2) {
        mark_linear(store, inst.tree, records, pos);
        chosen.push_back(pos);
      }
    }
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        bool brute = false;
        for (std::uint32_t pos : chosen)
          brute = brute || edge_covers(inst.tree, records[pos], u, v, false);
        CHECK(check_linear(store, u, v) == brute);
      }
    }
  }
}

TEST_CASE("mark_crossing writes (lca,node) slots; rejects non-crossing edges") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  MarkStore store(3);
  mark_crossing(store, fx.tree, records, 0);  // (3,5), lca 0, beta 2

  for (NodeId x : {3u, 1u, 4u, 0u, 5u, 2u}) CHECK(store.crossing_has(0, x, 0));
  CHECK_FALSE(store.crossing_has(1, 3, 0));  // different lca slot untouched

  // marking with a different lca lands in disjoint slots
  mark_crossing(store, fx.tree, records, 2);  // (3,4), lca 1, beta 1
  CHECK(store.crossing_has(1, 3, 2));
  CHECK(store.crossing_has(1, 1, 2));
  CHECK(store.crossing_has(1, 4, 2));
  CHECK_FALSE(store.crossing_has(0, 3, 2));

  EdgeRecord fake = records[0];
  fake.lca = fake.u;  // pretend it is non-crossing
  fake.is_crossing = false;
  std::vector<EdgeRecord> bad{fake};
  MarkStore store2(1);
  CHECK_THROWS(mark_crossing(store2, fx.tree, bad, 0));
}

TEST_CASE("deepest crossing edge: ball reaches exactly the lca") {
  // chain 0-1-2 plus 0-3-4: edge (2,4) has lca 0 and beta = depth 2
  Graph g(5, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 3, 1.0}, {3, 4, 1.0}, {2, 4, 1.0}});
  RootedTree tree = root_tree(g, std::vector<EdgeId>{0, 1, 2, 3}, 0);
  std::vector<EdgeId> off{4};
  std::vector<EdgeRecord> records = records_for(g, tree, off);
  CHECK(compute_beta(tree, 2, 4, 0, true) == 2);
  CoverageBall ball = coverage_ball(tree, 2, 2);
  std::sort(ball.nodes.begin(), ball.nodes.end());
  CHECK(ball.nodes == std::vector<NodeId>{0, 1, 2});  // stops at the root
}

TEST_CASE("check_crossing fast path on the fixture") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  MarkStore store(3);
  mark_crossing(store, fx.tree, records, 0);

  CHECK(check_crossing(store, fx.tree, records, 4, 5, 0));        // covered by (3,5)
  CHECK_FALSE(check_crossing(store, fx.tree, records, 3, 4, 1));  // different lca
  MarkStore empty(3);
  CHECK_FALSE(check_crossing(empty, fx.tree, records, 4, 5, 0));
}

TEST_CASE("check_crossing slow path demands an actual covering edge") {
  // tree 0-1, 0-2, 1-3, 3-5, 2-4; crossing edge (5,4) marks; checked edge
  // (0,4) is non-crossing (lca is endpoint 0) and intersects the token sets
  // without being covered
  Graph g(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {3, 5, 1.0}, {2, 4, 1.0},
              {4, 5, 1.0}, {0, 4, 1.0}});
  RootedTree tree = root_tree(g, std::vector<EdgeId>{0, 1, 2, 3, 4}, 0);
  std::vector<EdgeId> off{5, 6};
  std::vector<EdgeRecord> records = records_for(g, tree, off);
  REQUIRE(records[0].id == 5);  // (4,5) has the larger stretch
  REQUIRE(records[0].is_crossing);
  REQUIRE_FALSE(records[1].is_crossing);

  MarkStore store(2);
  mark_crossing(store, tree, records, 0);
  // both endpoints of (0,4) carry the token...
  CHECK(store.crossing_has(0, 0, 0));
  CHECK(store.crossing_has(0, 4, 0));
  // ...but (0,4) is not covered: 0 is outside the ball around 5
  CHECK_FALSE(edge_covers(tree, records[0], 0, 4, true));
  CHECK_FALSE(check_crossing(store, tree, records, 0, 4, 0));
}

TEST_CASE("lemma sweep: coverage by a crossing edge pins the lca") {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 100; ++round) {
    NodeId n = static_cast<NodeId>(4 + rng() % 61);
    std::uint64_t m = std::min<std::uint64_t>(n + rng() % (3 * n),
                                              static_cast<std::uint64_t>(n) * (n - 1) / 2);
    auto inst = random_instance(n, m, rng());
    std::vector<EdgeRecord> records = records_for(inst.graph, inst.tree, inst.offtree_ids);

    for (const EdgeRecord& e : records) {
      if (!e.is_crossing) continue;
      std::uint32_t beta = compute_beta(inst.tree, e.u, e.v, e.lca, true);
      auto within = [&](NodeId center, NodeId x) {
        NodeId meet = lca(inst.tree, center, x);
        return inst.tree.depth[center] + inst.tree.depth[x] - 2 * inst.tree.depth[meet] <= beta;
      };
      for (const EdgeRecord& f : records) {
        bool covered = edge_covers(inst.tree, e, f.u, f.v, true);
        // a covering crossing edge shares the covered edge's lca
        if (covered) CHECK(f.lca == e.lca);
        // for crossing pairs, near-endpoints plus equal lca is exactly coverage
        if (f.is_crossing) {
          bool endpoints_near = (within(e.u, f.u) || within(e.v, f.u)) &&
                                (within(e.u, f.v) || within(e.v, f.v));
          CHECK(covered == (endpoints_near && f.lca == e.lca));
        }
      }
    }
  }
}

TEST_CASE("mark store bitmaps agree with a hash-set reference") {
  std::mt19937_64 rng(71);
  constexpr std::uint32_t universe = 300;
  MarkStore store(universe);
  std::set<std::tuple<NodeId, int, std::uint32_t>> tokens;    // (node, side, pos)
  std::set<std::tuple<NodeId, NodeId, std::uint32_t>> cross;  // (lca, node, pos)

  for (int op = 0; op < 20000; ++op) {
    NodeId a = static_cast<NodeId>(rng() % 40);
    NodeId b = static_cast<NodeId>(rng() % 40);
    std::uint32_t pos = static_cast<std::uint32_t>(rng() % universe);
    switch (rng() % 4) {
      case 0: {
        MarkSide side = rng() % 2 ? MarkSide::first : MarkSide::second;
        store.add_token(a, pos, side);
        tokens.insert({a, static_cast<int>(side), pos});
        break;
      }
      case 1:
        store.add_crossing(a, b, pos);
        cross.insert({a, b, pos});
        break;
      case 2: {
        bool expected = false;
        for (std::uint32_t p = 0; p < universe && !expected; ++p)
          expected = (tokens.count({a, 1, p}) && tokens.count({b, 2, p})) ||
                     (tokens.count({b, 1, p}) && tokens.count({a, 2, p}));
        CHECK(store.check_pair(a, b) == expected);
        break;
      }
      default: {
        NodeId lca_node = static_cast<NodeId>(rng() % 8);
        bool expected = false;
        for (std::uint32_t p = 0; p < universe && !expected; ++p)
          expected = cross.count({lca_node, a, p}) && cross.count({lca_node, b, p});
        CHECK(store.crossing_intersects(lca_node, a, b) == expected);
        CHECK(store.crossing_has(lca_node, a, pos) == (cross.count({lca_node, a, pos}) > 0));
        break;
      }
    }
  }
}

TEST_CASE("linear pipeline equals the oracle on the fixture") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  std::vector<std::uint32_t> selected = linear_pipeline(records, fx.tree);
  CHECK(selected == std::vector<std::uint32_t>{0, 2});  // (3,5) and (3,4)
  CHECK(records[0].is_marked);
  CHECK(records[1].is_marked);
  CHECK(records[2].is_marked);
  CHECK(records[0].is_selected);
  CHECK_FALSE(records[1].is_selected);
  CHECK(records[2].is_selected);
}

TEST_CASE("recovery with no non-crossing edges and no flips changes nothing") {
  SixNodeFixture fx;
  std::vector<EdgeRecord> records = fx.records();
  MarkStore store(3);
  crossing_stage_sequential(store, records, fx.tree);
  std::vector<char> marked_before;
  for (const EdgeRecord& r : records) marked_before.push_back(r.is_marked);
  std::vector<char> selected_before;
  for (const EdgeRecord& r : records) selected_before.push_back(r.is_selected);

  recover_noncrossing(records, fx.tree);
  for (std::uint32_t pos = 0; pos < records.size(); ++pos)
    CHECK(records[pos].is_selected == (selected_before[pos] != 0));
  // decision-time marks only ever gain the late self/cross covers
  for (std::uint32_t pos = 0; pos < records.size(); ++pos)
    if (marked_before[pos]) CHECK(records[pos].is_marked);
}

TEST_CASE("linear pipeline equals the oracle on random instances") {
  std::mt19937_64 rng(83);
  int noncrossing_instances = 0;
  for (int round = 0; round < 400; ++round) {
    NodeId n = static_cast<NodeId>(4 + rng() % 197);
    std::uint64_t m = std::min<std::uint64_t>(n + rng() % (3 * n + 1),
                                              static_cast<std::uint64_t>(n) * (n - 1) / 2);
    auto inst = random_instance(n, m, rng());
    std::vector<EdgeRecord> records = records_for(inst.graph, inst.tree, inst.offtree_ids);
    for (const EdgeRecord& r : records) noncrossing_instances += !r.is_crossing;

    MarkOutcome oracle = naive_mark_all(inst.tree, records);
    std::vector<std::uint32_t> selected = linear_pipeline(records, inst.tree);

    std::vector<char> got_selected(records.size(), 0), got_marked(records.size(), 0);
    for (std::uint32_t pos : selected) got_selected[pos] = 1;
    for (std::uint32_t pos = 0; pos < records.size(); ++pos)
      got_marked[pos] = records[pos].is_marked;
    REQUIRE(got_selected == oracle.selected);
    REQUIRE(got_marked == oracle.marked);
  }
  // the sweep must actually have exercised non-crossing edges
  CHECK(noncrossing_instances > 50);
}
