#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <unordered_set>
#include <vector>

#include "netseg/community.hpp"
#include "netseg/error.hpp"
#include "netseg/random.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg {

/// Settings of the significance test that decides whether a cluster split is
/// kept in the hierarchy.
struct NullModelConfig {
  std::size_t replicates = 30;
  double z_threshold = 2.0;
  std::size_t min_subgraph_size = 4;
  std::uint64_t seed = 0;
  std::size_t swaps_per_edge = 10;  ///< endpoint-swap attempts per edge when rewiring
  unsigned threads = 1;

  void validate() const {
    if (replicates < 1) throw InputError("null model needs at least one replicate");
    if (!(z_threshold >= 0.0)) throw InputError("z threshold must be non-negative");
  }
};

struct SignificanceResult {
  bool significant = false;
  double observed = 0.0;   ///< modularity of the tested partition
  double null_mean = 0.0;
  double null_stddev = 0.0;
  double z = 0.0;           ///< (observed - mean) / stddev; ±inf when stddev is 0
  std::size_t replicates = 0;  ///< 0 when a guard short-circuited the test
};

/// Random graph with the same vertex count, edge count and (unweighted)
/// degree sequence: double-edge swaps (a,b),(c,d) -> (a,d),(c,b) that keep
/// the graph simple, then the original weight multiset shuffled onto the
/// rewired edges.
inline WeightedGraph rewire_preserving_degrees(const WeightedGraph& g, Rng& rng, std::size_t swaps_per_edge = 10) {
  const auto src = g.edges();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ends;
  std::vector<double> weights;
  ends.reserve(src.size());
  weights.reserve(src.size());
  for (const auto& e : src) {
    ends.emplace_back(e.u, e.v);
    weights.push_back(e.weight);
  }
  auto key = [](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  if (ends.size() >= 2) {
    std::unordered_set<std::uint64_t> present;
    present.reserve(ends.size() * 2);
    for (const auto& [a, b] : ends) present.insert(key(a, b));
    const std::size_t attempts = swaps_per_edge * ends.size();
    for (std::size_t t = 0; t < attempts; ++t) {
      const std::size_t i = rng.below(ends.size());
      const std::size_t j = rng.below(ends.size());
      if (i == j) continue;
      auto [a, b] = ends[i];
      auto [c, d] = ends[j];
      if (rng.bernoulli(0.5)) std::swap(c, d);
      if (a == d || c == b) continue;
      const auto k1 = key(a, d);
      const auto k2 = key(c, b);
      if (k1 == k2 || present.contains(k1) || present.contains(k2)) continue;
      present.erase(key(a, b));
      present.erase(key(c, d));
      present.insert(k1);
      present.insert(k2);
      ends[i] = {a, d};
      ends[j] = {c, b};
    }
  }
  rng.shuffle(std::span<double>(weights));
  std::vector<WeightedEdge> out;
  out.reserve(ends.size());
  for (std::size_t e = 0; e < ends.size(); ++e) {
    auto [a, b] = ends[e];
    if (a > b) std::swap(a, b);
    out.push_back({a, b, weights[e]});
  }
  return WeightedGraph(g.vertex_count(), std::move(out));
}

/// Compares the modularity of `p` (found by greedy_partition on `g`) with
/// the modularity greedy_partition reaches on `cfg.replicates` rewired copies
/// of `g`. Significant iff the graph is large enough, p has at least two
/// communities, and Q_observed > mean + z_threshold · stddev (Q_observed >
/// mean when the null distribution has zero spread). Replicate r uses seed
/// `cfg.seed + r`.
inline SignificanceResult test_significance(const WeightedGraph& g, const Partition& p, const NullModelConfig& cfg) {
  cfg.validate();
  SignificanceResult res;
  res.observed = modularity(g, p);
  if (g.vertex_count() < cfg.min_subgraph_size || p.K < 2 || g.edge_count() == 0) return res;

  std::vector<double> null_q(cfg.replicates, 0.0);
  auto run = [&](std::size_t r) {
    Rng rng(cfg.seed + r);
    const WeightedGraph null_graph = rewire_preserving_degrees(g, rng, cfg.swaps_per_edge);
    null_q[r] = modularity(null_graph, greedy_partition(null_graph));
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.replicates)));
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.replicates; r += workers) run(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  double mean = 0.0;
  for (double q : null_q) mean += q;
  mean /= static_cast<double>(null_q.size());
  double var = 0.0;
  for (double q : null_q) var += (q - mean) * (q - mean);
  const double sd = null_q.size() > 1 ? std::sqrt(var / static_cast<double>(null_q.size() - 1)) : 0.0;

  res.replicates = cfg.replicates;
  res.null_mean = mean;
  res.null_stddev = sd;
  if (sd > 0.0) {
    res.z = (res.observed - mean) / sd;
    res.significant = res.observed > mean + cfg.z_threshold * sd;
  } else {
    res.z = res.observed > mean ? std::numeric_limits<double>::infinity()
                                : (res.observed < mean ? -std::numeric_limits<double>::infinity() : 0.0);
    res.significant = res.observed > mean;
  }
  return res;
}

}  // namespace netseg
