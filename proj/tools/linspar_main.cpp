#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linspar/pipeline.hpp"

namespace {

using namespace linspar;

int cmd_sparsify(const std::string& input, const std::string& output, unsigned threads,
                 const std::string& tree_dir, std::uint64_t budget, bool has_budget,
                 const std::string& report_path) {
  Graph graph = load_graph(input);
  if (!graph.is_connected()) {
    std::cerr << "error: input graph is not connected\n";
    return 1;
  }
  PipelineConfig config;
  config.workers = threads;
  config.tree_direction = tree_dir == "min" ? TreeDirection::min : TreeDirection::max;
  if (has_budget) config.budget = budget;
  if (!report_path.empty()) config.report_path = report_path;

  SparsifyResult result = sparsify(graph, config);
  save_sparsifier(result.sparsifier, output, format_for_path(output));

  const StageReport& r = result.report;
  std::printf("n=%u l=%u selected=%llu\n", r.n, r.l,
              static_cast<unsigned long long>(r.selected));
  std::printf("eff=%.3fms mst=%.3fms lca=%.3fms res=%.3fms mark=%.3fms sort=%.3fms all=%.3fms\n",
              r.eff_ms, r.mst_ms, r.lca_ms, r.res_ms, r.mark_ms, r.sort_ms, r.total_ms);
  return 0;
}

int cmd_gen(std::uint32_t n, std::uint64_t m, std::uint64_t seed, const std::string& output) {
  Graph graph = generate_graph(GenSpec{n, m, seed});
  save_graph(graph, output, format_for_path(output));
  std::printf("wrote %s: n=%u l=%u\n", output.c_str(), graph.node_count(), graph.edge_count());
  return 0;
}

int cmd_verify(const std::string& input, unsigned threads) {
  Graph graph = load_graph(input);
  if (!graph.is_connected()) {
    std::cerr << "error: input graph is not connected\n";
    return 1;
  }
  PipelineConfig config;
  config.workers = threads;
  VerifyReport report = verify(graph, config);
  std::printf("pipeline selected: %llu, oracle selected: %llu\n",
              static_cast<unsigned long long>(report.pipeline_selected),
              static_cast<unsigned long long>(report.oracle_selected));
  std::printf("max tree-resistance deviation vs grounded solve: %.3e over %zu samples\n",
              report.max_resistance_rel_err, report.resistance_samples);
  if (!report.selection_match) {
    std::printf("FAIL: selections differ, first differing edge id %u\n",
                report.first_mismatch.value_or(0));
    return 1;
  }
  if (report.max_resistance_rel_err > 1e-9) {
    std::printf("FAIL: resistance deviation above 1e-9\n");
    return 1;
  }
  std::printf("PASS\n");
  return 0;
}

int cmd_bench(std::uint64_t n_start, std::uint64_t n_end, std::uint64_t m_ratio, unsigned trials,
              const std::vector<unsigned>& threads, const std::string& out_path,
              std::uint64_t seed) {
  std::vector<std::pair<NodeId, std::uint64_t>> sizes;
  for (std::uint64_t n = n_start; n <= n_end; n *= 2)
    sizes.emplace_back(static_cast<NodeId>(n), n * m_ratio);
  std::vector<BenchRow> rows = bench(sizes, trials, threads, seed);
  std::string csv = bench_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    file << csv;
    std::printf("wrote %s (%zu rows)\n", out_path.c_str(), rows.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph spectral sparsification toolkit"};
  app.require_subcommand(1);

  // sparsify
  std::string in_path, out_path, report_path;
  unsigned threads = 1;
  std::string tree_dir = "max";
  std::uint64_t budget = 0;
  auto* sp = app.add_subcommand("sparsify", "sparsify a graph");
  sp->add_option("-i,--input", in_path, "input graph (.mtx or tsv)")->required();
  sp->add_option("-o,--output", out_path, "output sparsifier path")->required();
  sp->add_option("--threads", threads, "worker count");
  sp->add_option("--tree", tree_dir, "spanning tree direction")
      ->check(CLI::IsMember({"max", "min"}));
  auto* budget_opt = sp->add_option("--budget", budget, "max selected off-tree edges");
  sp->add_option("--report", report_path, "write stage timing report (json)");

  // gen
  std::uint32_t gen_n = 0;
  std::uint64_t gen_m = 0, gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a random connected graph");
  gen->add_option("-n", gen_n, "node count")->required();
  gen->add_option("-m", gen_m, "edge count (>= n-1)")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("-o,--output", gen_out, "output path")->required();

  // verify
  std::string verify_in;
  unsigned verify_threads = 1;
  auto* ver = app.add_subcommand("verify", "differential check against the naive oracle");
  ver->add_option("-i,--input", verify_in, "input graph")->required();
  ver->add_option("--threads", verify_threads, "worker count");

  // bench
  std::uint64_t n_start = 16384, n_end = 1048576, m_ratio = 4, bench_seed = 1;
  unsigned trials = 3;
  std::vector<unsigned> bench_threads{1, 2, 4, 8};
  std::string bench_out;
  auto* bn = app.add_subcommand("bench", "scaling benchmark over generated graphs");
  bn->add_option("--n-start", n_start, "first node count (doubled up to --n-end)");
  bn->add_option("--n-end", n_end, "last node count");
  bn->add_option("--m-ratio", m_ratio, "edges per node");
  bn->add_option("--trials", trials, "trials per configuration");
  bn->add_option("--threads", bench_threads, "worker counts")->delimiter(',');
  bn->add_option("--out", bench_out, "output csv path (stdout when omitted)");
  bn->add_option("--seed", bench_seed, "generator seed base");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sp->parsed())
      return cmd_sparsify(in_path, out_path, threads, tree_dir, budget,
                          budget_opt->count() > 0, report_path);
    if (gen->parsed()) return cmd_gen(gen_n, gen_m, gen_seed, gen_out);
    if (ver->parsed()) return cmd_verify(verify_in, verify_threads);
    if (bn->parsed())
      return cmd_bench(n_start, n_end, m_ratio, trials, bench_threads, bench_out, bench_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
