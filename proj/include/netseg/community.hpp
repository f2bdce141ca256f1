#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netseg/error.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg {

/// Assignment of vertices 0..n-1 to communities 0..K-1 (contiguous).
struct Partition {
  std::vector<std::uint32_t> membership;
  std::size_t K = 0;

  /// Builds a partition from arbitrary labels, relabeling them to 0..K-1 in
  /// ascending label order. Already-contiguous labels are kept unchanged.
  static Partition from_labels(std::span<const std::uint32_t> labels) {
    std::vector<std::uint32_t> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    Partition p;
    p.K = distinct.size();
    p.membership.reserve(labels.size());
    for (auto l : labels) {
      p.membership.push_back(
          static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), l) - distinct.begin()));
    }
    return p;
  }

  static Partition singletons(std::size_t n) {
    Partition p;
    p.K = n;
    p.membership.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.membership[i] = static_cast<std::uint32_t>(i);
    return p;
  }

  static Partition single(std::size_t n) {
    Partition p;
    p.K = n == 0 ? 0 : 1;
    p.membership.assign(n, 0);
    return p;
  }

  std::size_t size() const { return membership.size(); }

  /// Members of each community, ascending.
  std::vector<std::vector<std::uint32_t>> groups() const {
    std::vector<std::vector<std::uint32_t>> out(K);
    for (std::size_t v = 0; v < membership.size(); ++v) out[membership[v]].push_back(static_cast<std::uint32_t>(v));
    return out;
  }

  bool valid() const {
    std::vector<char> used(K, 0);
    for (auto c : membership) {
      if (c >= K) return false;
      used[c] = 1;
    }
    return std::all_of(used.begin(), used.end(), [](char u) { return u != 0; });
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

namespace detail {

/// Minimum modularity gain for a merge or a move to be applied.
inline constexpr double kMinGain = 1e-12;

/// Modularity of arbitrary labels (each < n).
inline double modularity_of_labels(const WeightedGraph& g, std::span<const std::uint32_t> labels) {
  const double two_m = 2.0 * g.total_weight();
  if (two_m == 0.0) return 0.0;
  const std::size_t n = g.vertex_count();
  std::vector<double> internal(n, 0.0);
  std::vector<double> volume(n, 0.0);
  std::vector<char> used(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = labels[v];
    used[c] = 1;
    volume[c] += g.degree(v);
    auto nb = g.neighbors(v);
    auto w = g.neighbor_weights(v);
    double inside = 0.0;
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (labels[nb[e]] == c) inside += w[e];
    }
    internal[c] += inside;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (used[c]) q += internal[c] - volume[c] * (volume[c] / two_m);
  }
  return q / two_m;
}

}  // namespace detail

/// Q = 1/2m Σ_k Σ_{i,j ∈ C_k} (ω_ij − d_i d_j / 2m), over ordered pairs
/// including i = j (ω_ii = 0). Zero for a graph without edges.
inline double modularity(const WeightedGraph& g, const Partition& p) {
  if (p.size() != g.vertex_count()) {
    throw InputError("partition covers " + std::to_string(p.size()) + " vertices, graph has " +
                     std::to_string(g.vertex_count()));
  }
  if (!p.valid()) throw InputError("partition labels are not contiguous");
  return detail::modularity_of_labels(g, p.membership);
}

/// Receives (labels, incrementally tracked Q) after every merge or move.
/// Labels are the working community labels, not compacted.
using GreedyObserver = std::function<void(std::span<const std::uint32_t>, double)>;

namespace detail {

/// Working state shared by the merge and relocation phases.
class CommunityState {
 public:
  CommunityState(const WeightedGraph& g, std::span<const std::uint32_t> labels)
      : g_(g), m_(g.total_weight()), label_(labels.begin(), labels.end()) {
    const std::size_t n = g.vertex_count();
    volume_.assign(n, 0.0);
    size_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      volume_[label_[v]] += g.degree(v);
      ++size_[label_[v]];
    }
    q_ = modularity_of_labels(g, label_);
  }

  double q() const { return q_; }
  std::span<const std::uint32_t> labels() const { return label_; }

  /// Greedy agglomeration: repeatedly merges the connected community pair with
  /// the largest ΔQ (ties: smallest index pair) while ΔQ > 0. Returns the
  /// number of merges performed.
  std::size_t merge_phase(const GreedyObserver& observe) {
    const std::size_t n = g_.vertex_count();
    if (m_ == 0.0) return 0;
    std::vector<std::unordered_map<std::uint32_t, double>> links(n);
    for (const auto& e : g_.edges()) {
      const auto a = label_[e.u];
      const auto b = label_[e.v];
      if (a == b) continue;
      links[a][b] += e.weight;
      links[b][a] += e.weight;
    }
    std::vector<std::uint32_t> version(n, 0);
    std::vector<std::vector<std::uint32_t>> members(n);
    for (std::size_t v = 0; v < n; ++v) members[label_[v]].push_back(static_cast<std::uint32_t>(v));

    struct Candidate {
      double gain;
      std::uint32_t a, b;  // a < b
      std::uint32_t va, vb;
    };
    auto worse = [](const Candidate& x, const Candidate& y) {
      if (x.gain != y.gain) return x.gain < y.gain;
      if (x.a != y.a) return x.a > y.a;
      return x.b > y.b;
    };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);
    auto push = [&](std::uint32_t a, std::uint32_t b, double w) {
      if (a > b) std::swap(a, b);
      heap.push({merge_gain(w, a, b), a, b, version[a], version[b]});
    };
    for (std::uint32_t a = 0; a < n; ++a) {
      for (const auto& [b, w] : links[a]) {
        if (a < b) push(a, b, w);
      }
    }

    std::size_t merges = 0;
    while (!heap.empty()) {
      const Candidate top = heap.top();
      heap.pop();
      if (size_[top.a] == 0 || size_[top.b] == 0 || version[top.a] != top.va || version[top.b] != top.vb) {
        continue;
      }
      if (!(top.gain > kMinGain)) break;
      // Survivor keeps the smaller index.
      const std::uint32_t keep = top.a;
      const std::uint32_t gone = top.b;
      links[keep].erase(gone);
      links[gone].erase(keep);
      for (const auto& [c, w] : links[gone]) {
        links[keep][c] += w;
        auto& back = links[c];
        back[keep] += w;
        back.erase(gone);
      }
      links[gone].clear();
      for (auto v : members[gone]) label_[v] = keep;
      members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
      members[gone].clear();
      volume_[keep] += volume_[gone];
      volume_[gone] = 0.0;
      size_[keep] += size_[gone];
      size_[gone] = 0;
      q_ += top.gain;
      ++version[keep];
      ++merges;
      for (const auto& [c, w] : links[keep]) push(keep, c, w);
      if (observe) observe(label_, q_);
    }
    return merges;
  }

  /// Passes of best single-vertex relocation until a full pass moves nothing.
  /// Targets are neighboring communities or a fresh singleton community.
  /// Returns the number of moves.
  std::size_t relocation_phase(const GreedyObserver& observe) {
    const std::size_t n = g_.vertex_count();
    if (m_ == 0.0) return 0;
    const double inv_m = 1.0 / m_;
    const double inv_2m2 = 1.0 / (2.0 * m_ * m_);
    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint32_t> free_labels;
    for (std::uint32_t c = 0; c < n; ++c) {
      if (size_[c] == 0) free_labels.push_back(c);
    }
    std::sort(free_labels.rbegin(), free_labels.rend());  // pop_back yields the smallest

    std::size_t moves = 0;
    for (bool moved = true; moved;) {
      moved = false;
      for (std::size_t v = 0; v < n; ++v) {
        const std::uint32_t home = label_[v];
        const double dv = g_.degree(v);
        if (dv == 0.0) continue;
        touched.clear();
        auto nb = g_.neighbors(v);
        auto w = g_.neighbor_weights(v);
        for (std::size_t e = 0; e < nb.size(); ++e) {
          const auto c = label_[nb[e]];
          if (link[c] == 0.0) touched.push_back(c);
          link[c] += w[e];
        }
        const double k_home = link[home];
        std::sort(touched.begin(), touched.end());
        double best_gain = kMinGain;
        std::int64_t best = -1;
        for (auto c : touched) {
          if (c == home) continue;
          const double gain = (link[c] - k_home) * inv_m - dv * (volume_[c] - volume_[home] + dv) * inv_2m2;
          if (gain > best_gain) {
            best_gain = gain;
            best = c;
          }
        }
        if (size_[home] > 1 && !free_labels.empty()) {
          const double gain = -k_home * inv_m - dv * (dv - volume_[home]) * inv_2m2;
          if (gain > best_gain) {
            best_gain = gain;
            best = free_labels.back();
          }
        }
        for (auto c : touched) link[c] = 0.0;
        if (best < 0) continue;

        const auto target = static_cast<std::uint32_t>(best);
        if (!free_labels.empty() && target == free_labels.back()) free_labels.pop_back();
        volume_[home] -= dv;
        volume_[target] += dv;
        --size_[home];
        ++size_[target];
        if (size_[home] == 0) {
          volume_[home] = 0.0;
          free_labels.insert(std::upper_bound(free_labels.begin(), free_labels.end(), home, std::greater<>()), home);
        }
        label_[v] = target;
        q_ += best_gain;
        moved = true;
        ++moves;
        if (observe) observe(label_, q_);
      }
    }
    return moves;
  }

 private:
  double merge_gain(double w_ab, std::uint32_t a, std::uint32_t b) const {
    return w_ab / m_ - volume_[a] * volume_[b] / (2.0 * m_ * m_);
  }

  const WeightedGraph& g_;
  double m_;
  std::vector<std::uint32_t> label_;
  std::vector<double> volume_;
  std::vector<std::size_t> size_;
  double q_ = 0.0;
};

}  // namespace detail

/// Relocates single vertices to the community (or fresh singleton) that most
/// increases modularity, pass after pass, until no move improves Q.
/// Empty communities are dropped and labels re-compacted.
inline Partition refine_partition(const WeightedGraph& g, const Partition& p, const GreedyObserver& observe = {}) {
  if (p.size() != g.vertex_count()) throw InputError("partition does not match graph");
  for (auto c : p.membership) {
    if (c >= std::max(p.K, g.vertex_count())) throw InputError("community label out of range");
  }
  detail::CommunityState state(g, p.membership);
  state.relocation_phase(observe);
  return Partition::from_labels(state.labels());
}

/// Greedy agglomerative modularity maximisation followed by vertex-relocation
/// refinement, alternated until neither phase improves Q. The result admits no
/// improving merge of two connected communities and no improving single-vertex
/// move. Deterministic.
inline Partition greedy_partition(const WeightedGraph& g, const GreedyObserver& observe = {}) {
  if (g.vertex_count() == 0) throw InputError("cannot partition an empty graph");
  const auto start = Partition::singletons(g.vertex_count());
  detail::CommunityState state(g, start.membership);
  state.merge_phase(observe);
  while (state.relocation_phase(observe) > 0) {
    if (state.merge_phase(observe) == 0) break;
  }
  return Partition::from_labels(state.labels());
}

}  // namespace netseg
