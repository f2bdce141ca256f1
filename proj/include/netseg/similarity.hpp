#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <istream>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "netseg/detail/text.hpp"
#include "netseg/ids.hpp"
#include "netseg/trajectory_store.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg {

/// Sparse non-negative weight vector over the dual id space, keyed by
/// position (trajectory positions for segments, segment positions for
/// trajectories). Zero weights are never stored.
struct WeightVector {
  std::vector<std::pair<std::uint32_t, double>> entries;  ///< ascending by key

  double norm() const {
    double s = 0.0;
    for (const auto& [k, w] : entries) s += w * w;
    return std::sqrt(s);
  }
};

/// Similarity graph whose vertex k stands for `vertices[k]`.
template <class Id>
struct SimilarityGraph {
  std::vector<Id> vertices;  ///< ascending
  WeightedGraph graph;
  std::vector<Id> zero_norm;  ///< vertices kept as isolated because their weight vector vanishes
  std::vector<Id> excluded;   ///< ids left out of the vertex set (never-visited segments)

  std::size_t index_of(Id id) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), id);
    if (it == vertices.end() || *it != id) {
      throw InputError("id " + std::to_string(id.value) + " is not a vertex of the similarity graph");
    }
    return static_cast<std::size_t>(it - vertices.begin());
  }

  bool contains(Id id) const { return std::binary_search(vertices.begin(), vertices.end(), id); }
};

using SegmentGraph = SimilarityGraph<SegmentId>;
using TrajectoryGraph = SimilarityGraph<TrajectoryId>;

// --- segment side: trajectories weighted per segment -----------------------

/// log(|S| / |distinct segments of T|): importance of a trajectory.
inline double trajectory_importance(const TrajectoryDataset& ds, std::size_t trajectory_pos) {
  const double distinct = static_cast<double>(ds.profile(trajectory_pos).size());
  return std::log(static_cast<double>(ds.network().segment_count()) / distinct);
}

/// ω_{T,s} = n_{s,T} / Σ_{T'} n_{s,T'} · log(|S| / |T|_distinct).
inline double segment_weight(const TrajectoryDataset& ds, TrajectoryId t, SegmentId s) {
  const std::uint32_t n = ds.count(t, s);
  if (n == 0) return 0.0;
  const std::size_t sp = ds.network().segment_index(s);
  const double tf = static_cast<double>(n) / static_cast<double>(ds.total_visits_at(sp));
  return tf * trajectory_importance(ds, ds.trajectory_index(t));
}

/// The bag-of-trajectories vector of a segment (keys: trajectory positions).
inline WeightVector segment_vector(const TrajectoryDataset& ds, std::size_t segment_pos) {
  WeightVector v;
  const double total = static_cast<double>(ds.total_visits_at(segment_pos));
  for (const Visit& visit : ds.visits_at(segment_pos)) {
    const double w = static_cast<double>(visit.count) / total * trajectory_importance(ds, visit.trajectory);
    if (w > 0.0) v.entries.emplace_back(visit.trajectory, w);
  }
  return v;
}

// --- trajectory side: segments weighted per trajectory ---------------------

/// ω'_{s,T} = n_{s,T} / Σ_{s'} n_{s',T} · log(n / |{T' : s ∈ T'}|).
inline WeightVector trajectory_vector(const TrajectoryDataset& ds, std::size_t trajectory_pos) {
  WeightVector v;
  const double length = static_cast<double>(ds.trajectories()[trajectory_pos].segments.size());
  const double n = static_cast<double>(ds.size());
  for (const SegmentCount& sc : ds.profile(trajectory_pos)) {
    const double df = static_cast<double>(ds.visits_at(sc.segment).size());
    const double w = static_cast<double>(sc.count) / length * std::log(n / df);
    if (w > 0.0) v.entries.emplace_back(sc.segment, w);
  }
  return v;
}

/// Cosine of two sparse non-negative vectors; 0 when either norm is 0.
inline double cosine(const WeightVector& a, const WeightVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return std::min(1.0, dot / (na * nb));
}

inline double segment_similarity(const TrajectoryDataset& ds, SegmentId a, SegmentId b) {
  const auto& net = ds.network();
  return cosine(segment_vector(ds, net.segment_index(a)), segment_vector(ds, net.segment_index(b)));
}

inline double trajectory_similarity(const TrajectoryDataset& ds, TrajectoryId a, TrajectoryId b) {
  return cosine(trajectory_vector(ds, ds.trajectory_index(a)), trajectory_vector(ds, ds.trajectory_index(b)));
}

namespace detail {

/// Builds the cosine graph of `rows` by accumulating dot products through the
/// transposed lists `columns` (column -> (row, weight), rows ascending).
///
/// Row i only accumulates into rows j > i, and always in ascending column
/// order, so the sum for every pair is formed in the same order whatever the
/// number of workers. Cost is Σ_columns |column|².
inline WeightedGraph cosine_graph(std::span<const WeightVector> rows,
                                  std::span<const std::vector<std::pair<std::uint32_t, double>>> columns,
                                  unsigned threads) {
  const std::size_t n = rows.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = rows[i].norm();

  auto emit_rows = [&](std::size_t begin, std::size_t end, std::vector<WeightedEdge>& out) {
    std::vector<double> acc(n, 0.0);
    std::vector<std::uint32_t> touched;
    for (std::size_t i = begin; i < end; ++i) {
      if (norms[i] == 0.0) continue;
      touched.clear();
      for (const auto& [col, wi] : rows[i].entries) {
        const auto& list = columns[col];
        auto it = std::upper_bound(list.begin(), list.end(), static_cast<std::uint32_t>(i),
                                   [](std::uint32_t r, const auto& e) { return r < e.first; });
        for (; it != list.end(); ++it) {
          if (acc[it->first] == 0.0) touched.push_back(it->first);
          acc[it->first] += wi * it->second;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (auto j : touched) {
        const double sim = std::min(1.0, acc[j] / (norms[i] * norms[j]));
        if (sim > 0.0) out.push_back({static_cast<std::uint32_t>(i), j, sim});
        acc[j] = 0.0;
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 64 + 1)));
  std::vector<std::vector<WeightedEdge>> parts(workers);
  if (workers == 1) {
    emit_rows(0, n, parts[0]);
  } else {
    // Interleaved row blocks balance the triangular workload.
    constexpr std::size_t kBlock = 32;
    std::vector<std::vector<std::vector<WeightedEdge>>> blocks(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w * kBlock; b < n; b += workers * kBlock) {
          blocks[w].emplace_back();
          emit_rows(b, std::min(n, b + kBlock), blocks[w].back());
        }
      });
    }
    for (auto& t : pool) t.join();
    // Re-assemble in row order.
    std::vector<std::size_t> next(workers, 0);
    for (std::size_t b = 0, k = 0; b < n; b += kBlock, ++k) {
      auto& src = blocks[k % workers][next[k % workers]++];
      parts[0].insert(parts[0].end(), src.begin(), src.end());
    }
  }
  return WeightedGraph(n, std::move(parts[0]));
}

}  // namespace detail

/// Segment similarity graph: one vertex per visited segment, an edge for every
/// pair with positive cosine similarity, weighted by it. Never-visited
/// segments go to `excluded`; segments whose vector vanishes stay isolated.
inline SegmentGraph build_segment_similarity_graph(const TrajectoryDataset& ds, unsigned threads = 1) {
  SegmentGraph out;
  const auto& net = ds.network();
  auto visited = ds.visited_segments();
  {
    std::size_t k = 0;
    for (std::size_t s = 0; s < net.segment_count(); ++s) {
      if (k < visited.size() && visited[k] == s) {
        ++k;
      } else {
        out.excluded.push_back(net.segments()[s].id);
      }
    }
  }
  std::vector<WeightVector> rows(visited.size());
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns(ds.size());
  for (std::size_t k = 0; k < visited.size(); ++k) {
    out.vertices.push_back(net.segments()[visited[k]].id);
    rows[k] = segment_vector(ds, visited[k]);
    if (rows[k].entries.empty()) out.zero_norm.push_back(out.vertices.back());
    for (const auto& [t, w] : rows[k].entries) columns[t].emplace_back(static_cast<std::uint32_t>(k), w);
  }
  out.graph = detail::cosine_graph(rows, columns, threads);
  return out;
}

/// Dual graph over trajectories, weighted with ω'_{s,T}.
inline TrajectoryGraph build_trajectory_similarity_graph(const TrajectoryDataset& ds, unsigned threads = 1) {
  TrajectoryGraph out;
  auto trajs = ds.trajectories();
  std::vector<std::size_t> order(trajs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return trajs[a].id < trajs[b].id; });

  std::vector<WeightVector> rows(trajs.size());
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns(ds.network().segment_count());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.vertices.push_back(trajs[order[k]].id);
    rows[k] = trajectory_vector(ds, order[k]);
    if (rows[k].entries.empty()) out.zero_norm.push_back(out.vertices.back());
    for (const auto& [s, w] : rows[k].entries) columns[s].emplace_back(static_cast<std::uint32_t>(k), w);
  }
  out.graph = detail::cosine_graph(rows, columns, threads);
  return out;
}

/// Writes `i,j,weight` rows (ids, i < j) with 9 significant digits.
template <class Id>
void write_graph_edges(std::ostream& os, const SimilarityGraph<Id>& g) {
  os << "i,j,weight\n";
  for (const auto& e : g.graph.edges()) {
    os << g.vertices[e.u].value << ',' << g.vertices[e.v].value << ',' << detail::format_real(e.weight) << '\n';
  }
}

/// Vertex-list sidecar: `vertex_id` per row.
template <class Id>
void write_graph_vertices(std::ostream& os, const SimilarityGraph<Id>& g) {
  os << "vertex_id\n";
  for (auto id : g.vertices) os << id.value << '\n';
}

/// Reads a graph written by write_graph_vertices / write_graph_edges. Edges
/// may list their endpoints in either order; unknown ids are rejected.
template <class Id>
SimilarityGraph<Id> read_similarity_graph(std::istream& vertices_in, std::istream& edges_in) {
  using namespace detail;
  SimilarityGraph<Id> out;
  {
    LineReader reader(vertices_in);
    expect_header(reader, "vertex_id");
    std::string_view line;
    while (reader.next(line)) out.vertices.push_back(Id{parse_u64(trim(line), reader.line(), "vertex id")});
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  for (std::size_t k = 1; k < out.vertices.size(); ++k) {
    if (out.vertices[k] == out.vertices[k - 1]) {
      throw InputError("vertex " + std::to_string(out.vertices[k].value) + " listed twice");
    }
  }
  std::vector<WeightedEdge> edges;
  {
    LineReader reader(edges_in);
    expect_header(reader, "i,j,weight");
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, ',');
      if (f.size() != 3) throw ParseError(reader.line(), "expected 3 fields in edge row");
      const Id a{parse_u64(f[0], reader.line(), "i")};
      const Id b{parse_u64(f[1], reader.line(), "j")};
      const double w = parse_f64(f[2], reader.line(), "weight");
      if (!out.contains(a) || !out.contains(b)) {
        throw ParseError(reader.line(), "edge references unknown vertex " +
                                            std::to_string((out.contains(a) ? b : a).value));
      }
      auto u = static_cast<std::uint32_t>(out.index_of(a));
      auto v = static_cast<std::uint32_t>(out.index_of(b));
      if (u == v) throw ParseError(reader.line(), "self-edge on vertex " + std::to_string(a.value));
      if (u > v) std::swap(u, v);
      edges.push_back({u, v, w});
    }
  }
  out.graph = WeightedGraph(out.vertices.size(), std::move(edges));
  return out;
}

}  // namespace netseg
