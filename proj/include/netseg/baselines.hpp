#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "netseg/community.hpp"
#include "netseg/error.hpp"
#include "netseg/kmeans.hpp"
#include "netseg/linalg.hpp"
#include "netseg/random.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg {

struct LabelPropConfig {
  std::size_t max_rounds = 100;
  std::uint64_t seed = 0;
};

struct LabelPropStats {
  std::size_t rounds = 0;
  bool converged = false;
};

/// Weighted label propagation with asynchronous updates.
///
/// Every vertex starts with its own label. Each round visits the vertices in
/// a fresh seeded random order; a vertex whose label does not carry the
/// maximal summed edge weight among its neighbors adopts one of the maximal
/// labels, chosen uniformly at random. Stops after a round without change
/// (every label is weight-maximal) or after max_rounds.
inline Partition label_propagation(const WeightedGraph& g, const LabelPropConfig& cfg,
                                   LabelPropStats* stats = nullptr) {
  if (cfg.max_rounds < 1) throw InputError("label propagation needs max_rounds >= 1");
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);
  std::vector<std::uint32_t> order(label);
  std::vector<double> weight(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> ties;
  Rng rng(cfg.seed);

  LabelPropStats st;
  for (std::size_t round = 0; round < cfg.max_rounds; ++round) {
    ++st.rounds;
    rng.shuffle(std::span<std::uint32_t>(order));
    bool changed = false;
    for (auto v : order) {
      auto nb = g.neighbors(v);
      if (nb.empty()) continue;
      auto w = g.neighbor_weights(v);
      touched.clear();
      for (std::size_t e = 0; e < nb.size(); ++e) {
        const auto l = label[nb[e]];
        if (weight[l] == 0.0) touched.push_back(l);
        weight[l] += w[e];
      }
      double top = 0.0;
      for (auto l : touched) top = std::max(top, weight[l]);
      const double tol = 1e-12 * top;
      if (weight[label[v]] >= top - tol) {
        for (auto l : touched) weight[l] = 0.0;
        continue;
      }
      ties.clear();
      for (auto l : touched) {
        if (weight[l] >= top - tol) ties.push_back(l);
      }
      std::sort(ties.begin(), ties.end());
      label[v] = ties[rng.below(ties.size())];
      changed = true;
      for (auto l : touched) weight[l] = 0.0;
    }
    if (!changed) {
      st.converged = true;
      break;
    }
  }
  if (stats) *stats = st;
  return Partition::from_labels(label);
}

struct SpectralConfig {
  std::size_t k = 2;
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iters = 300;
  double eig_tolerance = 1e-10;
  std::uint64_t seed = 0;
};

/// Symmetric normalized Laplacian I − D^{-1/2} W D^{-1/2} restricted to
/// `vertices` (which must all have positive degree within the graph).
inline DenseMatrix normalized_laplacian(const WeightedGraph& g, std::span<const std::uint32_t> vertices) {
  const std::size_t r = vertices.size();
  std::vector<std::int64_t> local(g.vertex_count(), -1);
  for (std::size_t i = 0; i < r; ++i) local[vertices[i]] = static_cast<std::int64_t>(i);
  DenseMatrix lap(r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto v = vertices[i];
    lap(i, i) = 1.0;
    auto nb = g.neighbors(v);
    auto w = g.neighbor_weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const auto j = local[nb[e]];
      if (j < 0) continue;
      lap(i, static_cast<std::size_t>(j)) = -w[e] / std::sqrt(g.degree(v) * g.degree(nb[e]));
    }
  }
  return lap;
}

/// Spectral clustering: isolated vertices become singleton clusters; the rest
/// are embedded with the k eigenvectors of smallest eigenvalue of the
/// symmetric normalized Laplacian (cyclic Jacobi), rows normalized to unit
/// length, and grouped with k-means++ (best of kmeans_restarts). `k` counts
/// clusters among non-isolated vertices.
inline Partition spectral_clustering(const WeightedGraph& g, const SpectralConfig& cfg) {
  const std::size_t n = g.vertex_count();
  if (cfg.k < 1) throw InputError("spectral clustering needs k >= 1");
  if (cfg.k > n) {
    throw InputError("k = " + std::to_string(cfg.k) + " exceeds the vertex count " + std::to_string(n));
  }
  if (!(cfg.eig_tolerance > 0.0)) throw InputError("eigen tolerance must be positive");

  std::vector<std::uint32_t> active;
  std::vector<std::uint32_t> label(n, 0);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (g.degree_count(v) == 0) {
      label[v] = next++;
    } else {
      active.push_back(v);
    }
  }
  if (active.empty()) return Partition::from_labels(label);
  if (cfg.k > active.size()) {
    throw InputError("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(active.size()) +
                     " non-isolated vertices");
  }
  if (cfg.k == 1) {
    for (auto v : active) label[v] = next;
    return Partition::from_labels(label);
  }

  const auto eig = symmetric_eigen(normalized_laplacian(g, active), cfg.eig_tolerance);
  const std::size_t r = active.size();
  const std::size_t k = cfg.k;
  std::vector<double> embedding(r * k);
  for (std::size_t i = 0; i < r; ++i) {
    double norm = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double x = eig.vectors(c, i);
      embedding[i * k + c] = x;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t c = 0; c < k; ++c) embedding[i * k + c] /= norm;
    }
  }
  const auto km = kmeans(embedding, k, k, cfg.kmeans_restarts, cfg.kmeans_max_iters, cfg.seed);
  for (std::size_t i = 0; i < r; ++i) label[active[i]] = next + km.labels[i];
  return Partition::from_labels(label);
}

}  // namespace netseg
