// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every threshold below is the criterion's stated one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netseg/baselines.hpp"
#include "netseg/community.hpp"
#include "netseg/evaluation.hpp"
#include "netseg/experiment.hpp"
#include "netseg/generator.hpp"
#include "netseg/hierarchy.hpp"
#include "netseg/scenarios.hpp"
#include "netseg/similarity.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/structure.hpp"

namespace netseg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

/// Every hierarchy built during the run, re-checked by the structural suite.
struct CorpusEntry {
  std::string name;
  WeightedGraph graph;
  ClusterHierarchy hierarchy;
  std::size_t replicates;
};
std::vector<CorpusEntry> g_corpus;

void record(const std::string& name, const WeightedGraph& g, const ClusterHierarchy& h, const NullModelConfig& cfg) {
  g_corpus.push_back({name, g, h, cfg.replicates});
}

// --- modularity oracle --------------------------------------------------------

Outcome modularity_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto g = testing::two_triangles();
  const double q_split = modularity(g, Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1}));
  const double q_single = modularity(g, Partition::single(6));
  const double q_singletons = modularity(g, Partition::singletons(6));
  o.require(std::abs(q_split - 5.0 / 14.0) <= 1e-12, "triangle partition Q = " + std::to_string(q_split));
  o.require(q_single == 0.0, "single community Q is not exactly 0");
  o.require(std::abs(q_singletons + 34.0 / 196.0) <= 1e-12, "singletons Q = " + std::to_string(q_singletons));
  const auto best = testing::exhaustive_best_partition(g);
  o.require(best.enumerated == 203, "enumerated " + std::to_string(best.enumerated) + " partitions");
  const auto p = greedy_partition(g);
  o.require(testing::canonical(p.membership) == testing::canonical(best.labels), "greedy differs from the optimum");
  o.require(std::abs(modularity(g, p) - best.q) <= 1e-12, "greedy Q below the optimum");
  const double t = seconds_since(t0);
  o.require(t < 1.0, "runtime " + std::to_string(t) + " s");
  std::ostringstream d;
  d << "Q=" << q_split << " optimum over " << best.enumerated << " partitions, " << t << " s";
  o.detail = d.str();
  return o;
}

// --- exhaustive local optimality ---------------------------------------------

Outcome local_optimality() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(20240611);
  std::size_t checked_moves = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(11);  // 2..12 vertices
    const auto g = testing::random_graph(n, 0.2 + 0.5 * rng.uniform(), rng);
    const auto p = greedy_partition(g);
    const auto w = testing::dense_weights(g);
    const double q = testing::naive_modularity(w, p.membership);
    const double tol = 1e-12;
    for (std::uint32_t a = 0; a < p.K; ++a) {
      for (std::uint32_t b = a + 1; b < p.K; ++b) {
        auto merged = p.membership;
        for (auto& l : merged) l = l == b ? a : l;
        ++checked_moves;
        o.require(testing::naive_modularity(w, merged) <= q + tol,
                  "graph " + std::to_string(t) + ": merging " + std::to_string(a) + "+" + std::to_string(b) + " improves");
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (std::uint32_t c = 0; c <= p.K; ++c) {  // c == K: v alone in a new community
        if (c == p.membership[v]) continue;
        auto moved = p.membership;
        moved[v] = c;
        ++checked_moves;
        o.require(testing::naive_modularity(w, moved) <= q + tol,
                  "graph " + std::to_string(t) + ": moving " + std::to_string(v) + " improves");
      }
    }
  }
  const double t = seconds_since(t0);
  o.require(t < 30.0, "runtime " + std::to_string(t) + " s");
  o.detail = "50 graphs, " + std::to_string(checked_moves) + " merges/moves checked, " + std::to_string(t) + " s";
  return o;
}

// --- similarity construction equivalence --------------------------------------

Outcome similarity_equivalence() {
  Outcome o;
  Rng rng(77);
  std::size_t edges = 0;
  double worst = 0.0;
  for (int d = 0; d < 20; ++d) {
    // 3x3 .. 4x4 grids: 24 to 48 segments.
    auto net = make_grid_network(3 + rng.below(2), 3 + rng.below(2));
    o.require(net->segment_count() <= 50, "network too large");
    GeneratorConfig cfg;
    cfg.n_trajectories = 1 + rng.below(10);
    cfg.n_archetypes = 1 + rng.below(4);
    cfg.detour_probability = 0.3;
    cfg.od_jitter = 1;
    cfg.seed = rng();
    const auto ds = generate_dataset(net, cfg).dataset;
    const auto g = build_segment_similarity_graph(ds);
    const auto naive = testing::naive_segment_edges(ds);
    o.require(g.graph.edge_count() == naive.size(), "dataset " + std::to_string(d) + ": edge counts differ");
    for (const auto& e : g.graph.edges()) {
      auto it = naive.find({g.vertices[e.u].value, g.vertices[e.v].value});
      if (it == naive.end()) {
        o.require(false, "dataset " + std::to_string(d) + ": edge missing from naive graph");
        continue;
      }
      worst = std::max(worst, std::abs(e.weight - it->second));
      ++edges;
    }
  }
  o.require(worst <= 1e-10, "max weight difference " + std::to_string(worst));
  std::ostringstream d;
  d << "20 datasets, " << edges << " edges, max |diff| = " << worst;
  o.detail = d.str();
  return o;
}

// --- planted recovery -----------------------------------------------------------

Outcome planted_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto regions = make_region_network(5, 7, true);
  int recovered = 0;
  std::ostringstream d;
  d << "best ARI per seed:";
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig cfg;
    cfg.n_trajectories = 100;
    cfg.n_archetypes = 5;
    cfg.od_jitter = 0;
    cfg.detour_probability = 0.1;
    cfg.regions = regions.regions;
    cfg.seed = seed;
    const auto gen = generate_dataset(regions.network, cfg);
    const auto tg = build_trajectory_similarity_graph(gen.dataset);
    std::vector<std::uint32_t> truth;
    for (auto id : tg.vertices) {
      truth.push_back(static_cast<std::uint32_t>(gen.archetype_of[gen.dataset.trajectory_index(id)]));
    }
    NullModelConfig nm;
    nm.seed = seed;
    const auto h = hierarchical_cluster(tg.graph, nm);
    record("planted seed " + std::to_string(seed), tg.graph, h, nm);
    double best = -1.0;
    for (int l = 1; l <= h.depth(); ++l) best = std::max(best, adjusted_rand_index(h.partition_at(l).membership, truth));
    recovered += best >= 0.9 ? 1 : 0;
    d << ' ' << std::round(best * 1000.0) / 1000.0;
  }
  const double t = seconds_since(t0);
  o.require(recovered >= 8, std::to_string(recovered) + "/10 seeds reach ARI 0.9");
  o.require(t < 60.0, "runtime " + std::to_string(t) + " s");
  d << "; " << recovered << "/10 seeds >= 0.9, " << t << " s";
  o.detail = d.str();
  return o;
}

// --- comparative ordering -------------------------------------------------------

Outcome comparative_ordering() {
  Outcome o;
  const auto t0 = Clock::now();
  // Every trajectory draws its own origin/destination pair (no planted
  // archetype groups), on a grid small enough for the dense eigensolver.
  auto net = make_grid_network(20, 20);
  int wins = 0;
  int larger_k_ok = 0;
  int larger_k_cases = 0;
  std::ostringstream d;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratorConfig gc;
    gc.n_trajectories = 100;
    gc.n_archetypes = 100;
    gc.od_jitter = 0;
    gc.detour_probability = 0.05;
    gc.seed = seed;
    const auto ds = generate_dataset(net, gc).dataset;
    ExperimentConfig ec;
    ec.seed = seed;
    const auto r = run_experiment("d" + std::to_string(seed), ds, ec);

    const bool beats_spectral = r.modularity.quality > r.spectral.quality;
    const bool beats_lp = r.modularity_matched.quality > r.labelprop.quality;
    const bool beats_spectral_matched = r.modularity_matched.quality > r.spectral_matched.quality;
    const bool win = beats_spectral && beats_lp && beats_spectral_matched;
    wins += win ? 1 : 0;

    // Larger K, larger quality: each method with two cluster counts.
    auto check_k = [&](const MethodScore& a, const MethodScore& b, const char* method) {
      if (a.K == b.K) return;
      ++larger_k_cases;
      const auto& lo = a.K < b.K ? a : b;
      const auto& hi = a.K < b.K ? b : a;
      if (hi.quality > lo.quality) {
        ++larger_k_ok;
      } else {
        o.require(false, r.dataset + " " + method + ": quality at K=" + std::to_string(hi.K) +
                             " does not exceed K=" + std::to_string(lo.K));
      }
    };
    check_k(r.modularity, r.modularity_matched, "modularity");
    check_k(r.spectral, r.spectral_matched, "spectral");

    char line[256];
    std::snprintf(line, sizeof line,
                  "\n    %s (%zu segs): mod %.2f(%zu) spec %.2f(%zu) | lp %.2f(%zu) spec %.2f(%zu) mod %.2f(%zu) -> %s",
                  r.dataset.c_str(), r.segments, r.modularity.quality, r.modularity.K, r.spectral.quality,
                  r.spectral.K, r.labelprop.quality, r.labelprop.K, r.spectral_matched.quality, r.spectral_matched.K,
                  r.modularity_matched.quality, r.modularity_matched.K, win ? "modularity best" : "not best");
    d << line;
  }
  const double t = seconds_since(t0);
  o.require(wins >= 4, "modularity best on " + std::to_string(wins) + "/5 datasets");
  o.require(t < 600.0, "runtime " + std::to_string(t) + " s");
  o.detail = "modularity best on " + std::to_string(wins) + "/5; larger K gives larger quality in " +
             std::to_string(larger_k_ok) + "/" + std::to_string(larger_k_cases) + " cases; " + std::to_string(t) +
             " s" + d.str();
  return o;
}

// --- spectral sanity --------------------------------------------------------------

Outcome spectral_sanity() {
  Outcome o;
  Rng rng(4242);
  double worst_residual = 0.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<std::uint32_t> truth;
    const auto g = testing::disconnected_graph(2 + rng.below(5), rng, &truth);
    const std::size_t c = truth.back() + 1;
    const auto p = spectral_clustering(g, {.k = c, .seed = static_cast<std::uint64_t>(t)});
    o.require(p.K == c && testing::canonical(p.membership) == testing::canonical(truth),
              "graph " + std::to_string(t) + ": components not recovered");

    std::vector<std::uint32_t> all(g.vertex_count());
    for (std::uint32_t v = 0; v < all.size(); ++v) all[v] = v;
    const auto lap = normalized_laplacian(g, all);
    const auto eig = symmetric_eigen(lap);
    const std::size_t n = lap.size();
    double fro = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) fro += lap(i, j) * lap(i, j);
    }
    fro = std::sqrt(fro);
    for (std::size_t k = 0; k < n; ++k) {
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double lv = 0.0;
        for (std::size_t j = 0; j < n; ++j) lv += lap(i, j) * eig.vectors(k, j);
        const double r = lv - eig.values[k] * eig.vectors(k, i);
        res += r * r;
      }
      worst_residual = std::max(worst_residual, std::sqrt(res) / fro);
    }
  }
  o.require(worst_residual <= 1e-6, "relative residual " + std::to_string(worst_residual));
  std::ostringstream d;
  d << "10 graphs recovered; max relative residual " << worst_residual;
  o.detail = d.str();
  return o;
}

// --- hub crossed matrix -------------------------------------------------------------

Outcome hub_crossed_matrix() {
  Outcome o;
  const auto gen = make_hub_scenario({});
  const auto& ds = gen.dataset;
  // Hub segments: visited by both group 0 and group 1.
  std::set<std::uint64_t> by0, by1;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (gen.archetype_of[i] > 1) continue;
    auto& dst = gen.archetype_of[i] == 0 ? by0 : by1;
    for (auto s : ds.trajectories()[i].segments) dst.insert(s.value);
  }
  std::vector<std::uint64_t> hub;
  std::set_intersection(by0.begin(), by0.end(), by1.begin(), by1.end(), std::back_inserter(hub));
  o.require(!hub.empty(), "scenario has no hub segments");

  const auto sg = build_segment_similarity_graph(ds);
  const auto tg = build_trajectory_similarity_graph(ds);
  NullModelConfig nm;
  nm.seed = 1;
  const auto sh = hierarchical_cluster(sg.graph, nm);
  const auto th = hierarchical_cluster(tg.graph, nm);
  record("hub segments", sg.graph, sh, nm);
  record("hub trajectories", tg.graph, th, nm);

  std::vector<std::uint32_t> truth;
  for (auto id : tg.vertices) truth.push_back(static_cast<std::uint32_t>(gen.archetype_of[ds.trajectory_index(id)]));
  const auto tp = th.partition_at(1);
  o.require(adjusted_rand_index(tp.membership, truth) == 1.0, "trajectory clusters differ from the corridor groups");

  std::ostringstream d;
  int levels_with_hub_column = 0;
  for (int l = 1; l <= sh.depth(); ++l) {
    const auto sp = sh.partition_at(l);
    const auto cm = crossed_matrix(ds, tg.vertices, tp, sg.vertices, sp);
    // The hub column: the segment cluster holding the hub segments.
    std::set<std::uint32_t> cols;
    for (auto s : hub) cols.insert(sp.membership[sg.index_of(SegmentId{s})]);
    if (cols.size() != 1) continue;
    ++levels_with_hub_column;
    const auto col = *cols.begin();
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < cm.rows; ++r) {
      if (cm.count(r, col) > 0) rows.push_back(r);
    }
    std::set<std::uint32_t> groups;
    for (auto r : rows) {
      for (std::size_t v = 0; v < tp.size(); ++v) {
        if (tp.membership[v] == r) groups.insert(truth[v]);
      }
    }
    o.require(rows.size() == 2, "level " + std::to_string(l) + ": hub column has " + std::to_string(rows.size()) +
                                    " non-zero cells");
    o.require(groups == std::set<std::uint32_t>{0, 1}, "level " + std::to_string(l) + ": hub rows are not groups 0, 1");
    d << "segment level " << l << " (K=" << sp.K << ", hub cluster size " << cm.col_sizes[col] << "): " << rows.size()
      << " non-zero cells; ";
  }
  o.require(levels_with_hub_column > 0, "no level keeps the hub in one cluster");
  o.detail = d.str();
  return o;
}

// --- performance ---------------------------------------------------------------------

Outcome performance() {
  Outcome o;
  auto net = make_grid_network(45, 45);
  GeneratorConfig gc;
  gc.n_trajectories = 100;
  gc.n_archetypes = 100;
  gc.od_jitter = 0;
  gc.detour_probability = 0.05;
  gc.seed = 1;
  const auto ds = generate_dataset(net, gc).dataset;
  const auto t0 = Clock::now();
  const auto sg = build_segment_similarity_graph(ds);
  const double build = seconds_since(t0);
  NullModelConfig nm;
  nm.seed = 1;
  const auto t1 = Clock::now();
  const auto h = hierarchical_cluster(sg.graph, nm);
  const double cluster = seconds_since(t1);
  record("performance", sg.graph, h, nm);
  const auto n = sg.graph.vertex_count();
  o.require(n >= 2000 && n <= 3000, "dataset has " + std::to_string(n) + " visited segments");
  o.require(build < 10.0, "graph build " + std::to_string(build) + " s");
  o.require(cluster < 60.0, "clustering " + std::to_string(cluster) + " s");
  std::ostringstream d;
  d << n << " segments, " << sg.graph.edge_count() << " edges; build " << build << " s, clustering " << cluster
    << " s (depth " << h.depth() << ")";
  o.detail = d.str();
  return o;
}

// --- hierarchy structural suite -----------------------------------------------------------

template <class Id>
std::string export_text(const ClusterHierarchy& h, std::span<const Id> ids) {
  std::ostringstream nodes, members, diag;
  write_hierarchy(nodes, members, h, ids);
  write_hierarchy_diagnostics(diag, h);
  return nodes.str() + members.str() + diag.str();
}

Outcome hierarchy_structure() {
  Outcome o;
  // Fixtures and random graphs join the hierarchies built by the other criteria.
  {
    NullModelConfig nm;
    nm.seed = 3;
    const auto g = testing::cliques({8, 8, 8}, 0.5);
    record("three bridged 8-cliques", g, hierarchical_cluster(g, nm), nm);
    Rng rng(5);
    for (int t = 0; t < 5; ++t) {
      const auto rg = testing::random_graph(30 + rng.below(50), 0.1, rng);
      nm.seed = 100 + t;
      record("random graph " + std::to_string(t), rg, hierarchical_cluster(rg, nm), nm);
    }
  }
  std::size_t nodes = 0;
  for (const auto& e : g_corpus) {
    for (const auto& v : testing::hierarchy_violations(e.graph, e.hierarchy, e.replicates)) {
      o.require(false, e.name + ": " + v);
    }
    nodes += e.hierarchy.nodes.size();
  }

  // Identical seeds give byte-identical exports, whatever the thread count.
  int identical = 0;
  const auto gen = make_hub_scenario({});
  const auto sg = build_segment_similarity_graph(gen.dataset);
  const auto tg = build_trajectory_similarity_graph(gen.dataset);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    NullModelConfig one;
    one.seed = seed;
    NullModelConfig many = one;
    many.threads = 4;
    const std::span<const SegmentId> sids(sg.vertices);
    const std::span<const TrajectoryId> tids(tg.vertices);
    const auto a = export_text(hierarchical_cluster(sg.graph, one), sids);
    const auto b = export_text(hierarchical_cluster(sg.graph, one), sids);
    const auto c = export_text(hierarchical_cluster(sg.graph, many), sids);
    const auto x = export_text(hierarchical_cluster(tg.graph, one), tids);
    const auto y = export_text(hierarchical_cluster(tg.graph, many), tids);
    const bool same = a == b && a == c && x == y;
    o.require(same, "exports differ for seed " + std::to_string(seed));
    identical += same ? 1 : 0;
  }
  o.detail = std::to_string(g_corpus.size()) + " hierarchies (" + std::to_string(nodes) +
             " nodes) well formed with diagnostics; " + std::to_string(identical) +
             "/3 seeds give byte-identical exports";
  return o;
}

}  // namespace
}  // namespace netseg

int main() {
  using namespace netseg;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  // The structural suite runs last so it covers every hierarchy built before it.
  const std::vector<Criterion> criteria = {
      {"modularity-oracle", modularity_oracle},
      {"exhaustive-local-optimality", local_optimality},
      {"similarity-construction-equivalence", similarity_equivalence},
      {"planted-structure-recovery", planted_recovery},
      {"comparative-ordering", comparative_ordering},
      {"spectral-sanity", spectral_sanity},
      {"hub-crossed-matrix", hub_crossed_matrix},
      {"performance-envelope", performance},
      {"hierarchy-structural-suite", hierarchy_structure},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << '\n';
    for (const auto& f : o.failures) std::cout << "    - " << f << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
