#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netseg/error.hpp"

namespace netseg {

struct WeightedEdge {
  std::uint32_t u;
  std::uint32_t v;  ///< u < v
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected weighted graph over vertices 0..n-1 with a CSR adjacency.
///
/// Each unordered pair is stored once in the edge list (u < v, sorted), and
/// twice in the adjacency. Weights are strictly positive and there are no
/// self-edges. d_i is the weighted degree, m = ½ Σ d_i.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  WeightedGraph(std::size_t vertex_count, std::vector<WeightedEdge> edges)
      : n_(vertex_count), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& ed = edges_[e];
      if (ed.u >= ed.v) throw InputError("edge must satisfy u < v");
      if (ed.v >= n_) throw InputError("edge endpoint out of range");
      if (!(ed.weight > 0.0)) throw InputError("edge weight must be positive");
      if (e > 0 && edges_[e - 1].u == ed.u && edges_[e - 1].v == ed.v) {
        throw InputError("duplicate edge " + std::to_string(ed.u) + "-" + std::to_string(ed.v));
      }
    }
    build_adjacency();
  }

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const WeightedEdge> edges() const { return edges_; }

  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::span<const double> neighbor_weights(std::size_t v) const {
    return {adj_w_.data() + offsets_[v], adj_w_.data() + offsets_[v + 1]};
  }
  std::size_t degree_count(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

  /// d_i = Σ_j ω_ij.
  double degree(std::size_t v) const { return degree_[v]; }
  std::span<const double> degrees() const { return degree_; }

  /// m = ½ Σ_i d_i, i.e. the total edge weight.
  double total_weight() const { return m_; }

  /// Subgraph induced by `vertices`; vertex k of the result is vertices[k].
  WeightedGraph induced_subgraph(std::span<const std::uint32_t> vertices) const {
    std::vector<std::uint32_t> local(n_, kAbsent);
    for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = static_cast<std::uint32_t>(k);
    std::vector<WeightedEdge> sub;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      const auto v = vertices[k];
      auto nb = neighbors(v);
      auto w = neighbor_weights(v);
      for (std::size_t e = 0; e < nb.size(); ++e) {
        const auto lk = local[nb[e]];
        if (lk != kAbsent && k < lk) sub.push_back({static_cast<std::uint32_t>(k), lk, w[e]});
      }
    }
    return WeightedGraph(vertices.size(), std::move(sub));
  }

 private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;

  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(2 * edges_.size());
    adj_w_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    degree_.assign(n_, 0.0);
    // Edges are sorted, so each vertex's neighbors come out ascending:
    // first the lower neighbors (as v of an earlier u), then the higher ones.
    for (const auto& e : edges_) {
      adj_[fill[e.v]] = e.u;
      adj_w_[fill[e.v]++] = e.weight;
    }
    for (const auto& e : edges_) {
      adj_[fill[e.u]] = e.v;
      adj_w_[fill[e.u]++] = e.weight;
    }
    double twice_m = 0.0;
    for (std::size_t v = 0; v < n_; ++v) {
      double d = 0.0;
      for (double w : neighbor_weights(v)) d += w;
      degree_[v] = d;
      twice_m += d;
    }
    m_ = 0.5 * twice_m;
  }

  std::size_t n_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> adj_;
  std::vector<double> adj_w_;
  std::vector<double> degree_;
  double m_ = 0.0;
};

}  // namespace netseg
