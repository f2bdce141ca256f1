#pragma once

// Matched-K comparison of modularity clustering against the two baselines
// on the segment similarity graph of one dataset.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "netseg/baselines.hpp"
#include "netseg/evaluation.hpp"
#include "netseg/hierarchy.hpp"
#include "netseg/random.hpp"
#include "netseg/similarity.hpp"

namespace netseg {

struct ExperimentConfig {
  NullModelConfig null_model;
  std::size_t labelprop_max_rounds = 100;
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iters = 300;
  double eig_tolerance = 1e-10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct MethodScore {
  std::size_t K = 0;
  double quality = 0.0;
  int level = 0;  ///< hierarchy level for modularity rows, 0 otherwise
};

/// One dataset's results. The first comparison uses modularity's level-1 K
/// for spectral clustering; the second takes label propagation's K and the
/// hierarchy level whose K is closest to it (ties: shallower level), with
/// spectral run again at that K.
struct ExperimentRow {
  std::string dataset;
  std::size_t segments = 0;
  std::size_t edges = 0;
  MethodScore modularity;
  MethodScore spectral;
  MethodScore labelprop;
  MethodScore modularity_matched;
  MethodScore spectral_matched;
  double seconds = 0.0;
};

/// Hierarchy level whose cluster count is closest to `k` (ties: shallower).
inline int closest_level(const ClusterHierarchy& h, std::size_t k) {
  int best = 1;
  std::size_t best_gap = static_cast<std::size_t>(-1);
  for (int l = 1; l <= h.depth(); ++l) {
    const std::size_t K = h.clusters_at(l).size();
    const std::size_t gap = K > k ? K - k : k - K;
    if (gap < best_gap) {
      best_gap = gap;
      best = l;
    }
  }
  return best;
}

/// Spectral clustering with `total_k` clusters overall. Isolated vertices
/// always form singletons, so k for the eigenproblem is total_k minus their
/// count (at least 1).
inline Partition spectral_total_k(const WeightedGraph& g, std::size_t total_k, const ExperimentConfig& cfg,
                                  std::uint64_t seed) {
  std::size_t isolated = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) isolated += g.degree_count(v) == 0 ? 1 : 0;
  SpectralConfig sc;
  sc.k = total_k > isolated ? total_k - isolated : 1;
  sc.kmeans_restarts = cfg.kmeans_restarts;
  sc.kmeans_max_iters = cfg.kmeans_max_iters;
  sc.eig_tolerance = cfg.eig_tolerance;
  sc.seed = seed;
  return spectral_clustering(g, sc);
}

inline ExperimentRow run_experiment(const std::string& name, const TrajectoryDataset& ds, const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRow row;
  row.dataset = name;
  const auto sg = build_segment_similarity_graph(ds, cfg.threads);
  const auto& g = sg.graph;
  if (g.vertex_count() == 0) throw InputError("dataset " + name + " visits no segment");
  row.segments = g.vertex_count();
  row.edges = g.edge_count();
  const std::span<const SegmentId> ids(sg.vertices);
  auto quality = [&](const Partition& p) { return partition_quality(ds, ids, p).total; };

  NullModelConfig nm = cfg.null_model;
  nm.seed = derive_seed(cfg.seed, 1);
  nm.threads = cfg.threads;
  const auto h = hierarchical_cluster(g, nm);
  const auto level1 = h.partition_at(1);
  row.modularity = {level1.K, quality(level1), 1};

  const auto spectral = spectral_total_k(g, level1.K, cfg, derive_seed(cfg.seed, 2));
  row.spectral = {spectral.K, quality(spectral), 0};

  const auto lp = label_propagation(g, {cfg.labelprop_max_rounds, derive_seed(cfg.seed, 3)});
  row.labelprop = {lp.K, quality(lp), 0};

  const int level = closest_level(h, lp.K);
  const auto matched = h.partition_at(level);
  row.modularity_matched = {matched.K, quality(matched), level};
  const auto spectral_matched = spectral_total_k(g, matched.K, cfg, derive_seed(cfg.seed, 4));
  row.spectral_matched = {spectral_matched.K, quality(spectral_matched), 0};

  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline void write_experiment_table(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << "dataset,segments,edges,modularity_K,modularity_quality,spectral_K,spectral_quality,labelprop_K,"
        "labelprop_quality,modularity_matched_level,modularity_matched_K,modularity_matched_quality,"
        "spectral_matched_K,spectral_matched_quality\n";
  for (const auto& r : rows) {
    using detail::format_real;
    os << r.dataset << ',' << r.segments << ',' << r.edges << ',' << r.modularity.K << ','
       << format_real(r.modularity.quality) << ',' << r.spectral.K << ',' << format_real(r.spectral.quality) << ','
       << r.labelprop.K << ',' << format_real(r.labelprop.quality) << ',' << r.modularity_matched.level << ','
       << r.modularity_matched.K << ',' << format_real(r.modularity_matched.quality) << ',' << r.spectral_matched.K
       << ',' << format_real(r.spectral_matched.quality) << '\n';
  }
}

}  // namespace netseg
