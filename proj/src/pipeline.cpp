#include "linspar/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "linspar/marking.hpp"
#include "linspar/rng.hpp"
#include "linspar/sortkit.hpp"

namespace linspar {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<EdgeId> ids_sorted_by_endpoints(const Graph& graph, std::vector<EdgeId> ids) {
  std::sort(ids.begin(), ids.end(), [&](EdgeId a, EdgeId b) {
    const Edge& ea = graph.edge(a);
    const Edge& eb = graph.edge(b);
    if (ea.u != eb.u) return ea.u < eb.u;
    if (ea.v != eb.v) return ea.v < eb.v;
    return a < b;
  });
  return ids;
}

std::vector<Edge> edges_of(const Graph& graph, const std::vector<EdgeId>& ids) {
  std::vector<Edge> out;
  out.reserve(ids.size());
  for (EdgeId id : ids) out.push_back(graph.edge(id));
  return out;
}

struct MarkingInput {
  RootedTree tree;          // centroid-rooted, original node labels
  RootedTree marking_tree;  // same tree in DFS preorder labels
  std::vector<EdgeId> tree_edge_ids;
  std::vector<EdgeRecord> records;  // resistance descending, ties ascending id;
                                    // endpoints/lca in marking labels
};

// Shared front half of the pipeline (everything before the marking stage);
// also the setup the verification oracle runs on, so both sides see the
// same tree and the same processing order.
MarkingInput prepare_marking_input(const Graph& graph, const PipelineConfig& config,
                                   StageReport* report) {
  const unsigned workers = config.workers;
  MarkingInput out;

  Clock::time_point t = Clock::now();
  NodeId root = select_root(graph);
  BfsLevels levels = workers > 1 ? bfs_parallel(graph, root, workers) : bfs(graph, root);
  std::vector<double> eff = effectiveness_scores(graph, levels);
  if (report) report->eff_ms = ms_since(t);

  t = Clock::now();
  std::vector<SortItem> eff_items(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) eff_items[e] = {eff[e], e};
  SortedRuns eff_runs = parallel_sort(std::move(eff_items), workers);
  RunCursor eff_cursor(eff_runs, config.tree_direction == TreeDirection::max
                                     ? SortDirection::descending
                                     : SortDirection::ascending);
  if (report) report->sort_ms += ms_since(t);

  t = Clock::now();
  SpanningForestParts parts = kruskal_partition(graph, eff_cursor);
  // root at the tree centroid: every root subtree stays <= N/2, which keeps
  // coverage radii small and the partition buckets splittable
  out.tree = root_tree(graph, parts.tree_edges, root);
  NodeId centroid = tree_centroid(out.tree);
  if (centroid != root) out.tree = root_tree(graph, parts.tree_edges, centroid);
  out.tree_edge_ids = std::move(parts.tree_edges);
  if (report) report->mst_ms = ms_since(t);

  t = Clock::now();
  std::vector<NodeId> lcas = compute_lcas(out.tree, graph, parts.offtree_edges, workers);
  if (report) report->lca_ms = ms_since(t);

  t = Clock::now();
  std::vector<double> res =
      resistance_scores(out.tree, graph, parts.offtree_edges, lcas, workers);
  if (report) report->res_ms = ms_since(t);

  t = Clock::now();
  std::vector<SortItem> res_items(res.size());
  for (std::uint32_t i = 0; i < res.size(); ++i)
    res_items[i] = {res[i], i};  // payload indexes the ascending-id off-tree list
  std::optional<TopKPlan> plan;
  if (config.budget)
    plan = TopKPlan{static_cast<std::size_t>(std::min<std::uint64_t>(*config.budget,
                                                                     res_items.size())),
                    workers};
  SortedRuns res_runs = parallel_sort(std::move(res_items), workers, plan);
  std::vector<std::uint32_t> order;
  order.reserve(res.size());
  RunCursor res_cursor(res_runs, SortDirection::descending);
  SortItem item;
  while (res_cursor.next(item)) order.push_back(item.payload);
  if (report) report->sort_ms += ms_since(t);

  out.records = build_records(graph, parts.offtree_edges, lcas, res, order);

  // marking runs on preorder labels: coverage balls are connected tree
  // regions, so this keeps their traversal cache-local
  RelabeledTree relabeled = relabel_preorder(out.tree);
  out.marking_tree = std::move(relabeled.tree);
  for (EdgeRecord& r : out.records) {
    r.u = relabeled.to_new[r.u];
    r.v = relabeled.to_new[r.v];
    r.lca = relabeled.to_new[r.lca];
  }
  return out;
}

}  // namespace

SparsifyResult sparsify(const Graph& graph, const PipelineConfig& config) {
  if (config.workers < 1) throw std::invalid_argument("sparsify: workers must be >= 1");
  if (graph.node_count() == 0) throw std::invalid_argument("sparsify: empty graph");
  if (!graph.is_connected()) throw std::invalid_argument("sparsify: graph must be connected");

  Clock::time_point start = Clock::now();
  SparsifyResult result;
  result.report.n = graph.node_count();
  result.report.l = graph.edge_count();

  MarkingInput input = prepare_marking_input(graph, config, &result.report);

  Clock::time_point t = Clock::now();
  PartitionPlan plan = build_partitions(input.marking_tree, input.records);
  std::vector<char> coverage;
  run_marking_parallel(plan, input.records, input.marking_tree,
                       ThreadConfig{config.workers, config.dispatch}, &coverage);
  std::vector<std::uint32_t> selected =
      recover_noncrossing(input.records, input.marking_tree, &coverage);
  if (config.budget && selected.size() > *config.budget)
    selected.resize(static_cast<std::size_t>(*config.budget));
  result.report.mark_ms = ms_since(t);

  std::vector<EdgeId> selected_ids;
  selected_ids.reserve(selected.size());
  for (std::uint32_t pos : selected) selected_ids.push_back(input.records[pos].id);

  Sparsifier& sp = result.sparsifier;
  sp.tree_edge_ids = ids_sorted_by_endpoints(graph, std::move(input.tree_edge_ids));
  sp.selected_edge_ids = ids_sorted_by_endpoints(graph, std::move(selected_ids));
  sp.tree_edges = edges_of(graph, sp.tree_edge_ids);
  sp.selected_edges = edges_of(graph, sp.selected_edge_ids);

  result.report.selected = sp.selected_edge_ids.size();
  result.report.total_ms = ms_since(start);

  if (config.report_path) write_report_json(result.report, *config.report_path);
  return result;
}

void save_sparsifier(const Sparsifier& sparsifier, const std::filesystem::path& path,
                     GraphFormat format) {
  auto weight = [](double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return std::string(buf);
  };
  std::string out;
  if (format == GraphFormat::matrix_market) {
    NodeId n = 0;
    for (const Edge& e : sparsifier.tree_edges) n = std::max({n, e.u + 1, e.v + 1});
    for (const Edge& e : sparsifier.selected_edges) n = std::max({n, e.u + 1, e.v + 1});
    std::size_t total = sparsifier.tree_edges.size() + sparsifier.selected_edges.size();
    out += "%%MatrixMarket matrix coordinate real symmetric\n";
    out += std::to_string(n) + " " + std::to_string(n) + " " + std::to_string(total) + "\n";
    for (const Edge& e : sparsifier.tree_edges)
      out += std::to_string(e.v + 1) + " " + std::to_string(e.u + 1) + " " + weight(e.w) + "\n";
    for (const Edge& e : sparsifier.selected_edges)
      out += std::to_string(e.v + 1) + " " + std::to_string(e.u + 1) + " " + weight(e.w) + "\n";
  } else {
    out += "# spanning tree edges\n";
    for (const Edge& e : sparsifier.tree_edges)
      out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + weight(e.w) + "\n";
    out += "# selected off-tree edges\n";
    for (const Edge& e : sparsifier.selected_edges)
      out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + weight(e.w) + "\n";
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::invalid_argument("cannot write " + path.string());
  file << out;
}

void write_report_json(const StageReport& report, const std::filesystem::path& path) {
  auto round3 = [](double ms) { return std::round(ms * 1000.0) / 1000.0; };
  nlohmann::json j{
      {"eff_ms", round3(report.eff_ms)},   {"mst_ms", round3(report.mst_ms)},
      {"lca_ms", round3(report.lca_ms)},   {"res_ms", round3(report.res_ms)},
      {"mark_ms", round3(report.mark_ms)}, {"sort_ms", round3(report.sort_ms)},
      {"total_ms", round3(report.total_ms)}, {"n", report.n},
      {"l", report.l},                     {"selected", report.selected},
  };
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::invalid_argument("cannot write " + path.string());
  file << j.dump(2) << "\n";
}

VerifyReport verify(const Graph& graph, const PipelineConfig& config,
                    std::optional<EdgeId> corrupt_edge) {
  if (graph.node_count() > 2000)
    throw std::invalid_argument("verify: oracle path is desk scale (N <= 2000)");
  if (!graph.is_connected()) throw std::invalid_argument("verify: graph must be connected");

  VerifyReport report;

  SparsifyResult pipeline = sparsify(graph, config);
  std::vector<EdgeId> pipeline_ids = pipeline.sparsifier.selected_edge_ids;
  std::sort(pipeline_ids.begin(), pipeline_ids.end());
  if (corrupt_edge) {
    auto it = std::lower_bound(pipeline_ids.begin(), pipeline_ids.end(), *corrupt_edge);
    if (it != pipeline_ids.end() && *it == *corrupt_edge)
      pipeline_ids.erase(it);
    else
      pipeline_ids.insert(it, *corrupt_edge);
  }

  // oracle side: same deterministic front half, naive marking
  PipelineConfig oracle_config = config;
  oracle_config.workers = 1;
  oracle_config.report_path.reset();
  MarkingInput input = prepare_marking_input(graph, oracle_config, nullptr);
  MarkOutcome outcome = naive_mark_all(input.marking_tree, input.records);
  std::vector<EdgeId> oracle_ids;
  for (std::uint32_t pos = 0; pos < input.records.size(); ++pos) {
    if (outcome.selected[pos]) oracle_ids.push_back(input.records[pos].id);
    if (config.budget && oracle_ids.size() == *config.budget) break;
  }
  std::sort(oracle_ids.begin(), oracle_ids.end());

  report.pipeline_selected = pipeline_ids.size();
  report.oracle_selected = oracle_ids.size();
  report.selection_match = pipeline_ids == oracle_ids;
  if (!report.selection_match) {
    // lowest edge id present in exactly one of the two selections
    std::size_t upto = std::min(pipeline_ids.size(), oracle_ids.size());
    std::size_t i = 0;
    while (i < upto && pipeline_ids[i] == oracle_ids[i]) ++i;
    if (i == upto) {
      report.first_mismatch = i < pipeline_ids.size() ? pipeline_ids[i] : oracle_ids[i];
    } else {
      report.first_mismatch = std::min(pipeline_ids[i], oracle_ids[i]);
    }
  }

  // resistance spot checks on the spanning tree
  Graph tree_graph(graph.node_count(),
                   edges_of(graph, pipeline.sparsifier.tree_edge_ids));
  GroundedLaplacianSolver solver(tree_graph);
  SplitMix64 rng(config.seed);
  const std::size_t samples = graph.node_count() > 1 ? 50 : 0;
  for (std::size_t s = 0; s < samples; ++s) {
    NodeId u = static_cast<NodeId>(rng.next_below(graph.node_count()));
    NodeId v = static_cast<NodeId>(rng.next_below(graph.node_count()));
    double fast = tree_resistance(input.tree, u, v, lca_fast(input.tree, u, v));
    double slow = solver.resistance(u, v);
    double scale = std::max({std::abs(fast), std::abs(slow), 1e-300});
    double rel = u == v ? std::abs(fast - slow) : std::abs(fast - slow) / scale;
    report.max_resistance_rel_err = std::max(report.max_resistance_rel_err, rel);
  }
  report.resistance_samples = samples;
  return report;
}

std::vector<BenchRow> bench(const std::vector<std::pair<NodeId, std::uint64_t>>& sizes,
                            unsigned trials, const std::vector<unsigned>& workers_list,
                            std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  std::vector<BenchRow> rows;
  std::uint64_t case_index = 0;
  for (const auto& [n, m] : sizes) {
    Graph graph = generate_graph(GenSpec{n, m, seed + case_index});
    ++case_index;
    for (unsigned workers : workers_list) {
      PipelineConfig config;
      config.workers = workers;
      std::vector<StageReport> reports;
      reports.reserve(trials);
      for (unsigned trial = 0; trial < trials; ++trial)
        reports.push_back(sparsify(graph, config).report);
      std::sort(reports.begin(), reports.end(),
                [](const StageReport& a, const StageReport& b) { return a.total_ms < b.total_ms; });
      BenchRow row;
      row.n = n;
      row.m = m;
      row.workers = workers;
      row.trials = trials;
      row.median = reports[reports.size() / 2];
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "n,m,threads,trials,eff_ms,mst_ms,lca_ms,res_ms,mark_ms,sort_ms,total_ms,selected\n";
  char buf[256];
  for (const BenchRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%u,%llu,%u,%u,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%llu\n",
                  row.n, static_cast<unsigned long long>(row.m), row.workers, row.trials,
                  row.median.eff_ms, row.median.mst_ms, row.median.lca_ms, row.median.res_ms,
                  row.median.mark_ms, row.median.sort_ms, row.median.total_ms,
                  static_cast<unsigned long long>(row.median.selected));
    out += buf;
  }
  return out;
}

}  // namespace linspar
