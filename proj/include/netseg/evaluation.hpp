#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "netseg/community.hpp"
#include "netseg/detail/text.hpp"
#include "netseg/error.hpp"
#include "netseg/hierarchy.hpp"
#include "netseg/ids.hpp"
#include "netseg/similarity.hpp"
#include "netseg/trajectory_store.hpp"

namespace netseg {

/// How the inner pair sum of the segment-partition quality is read.
enum class PairConvention {
  Unordered,      ///< each {s_i, s_j}, i ≠ j, once
  Ordered,        ///< (s_i, s_j) and (s_j, s_i), i ≠ j
  OrderedWithSelf ///< ordered pairs plus the |C| self-pairs
};

inline constexpr PairConvention kQualityPairConvention = PairConvention::Unordered;

struct QualityReport {
  double total = 0.0;
  std::vector<double> per_cluster;  ///< indexed by community
  std::size_t K = 0;
};

/// Quality of a segment partition: Σ_C 1/|C| Σ_{pairs in C} |T(s_i) ∩ T(s_j)| / |T(s_i) ∪ T(s_j)|,
/// where T(s) is the set of trajectories visiting s. `segments[k]` is the
/// segment of partition vertex k.
inline QualityReport partition_quality(const TrajectoryDataset& ds, std::span<const SegmentId> segments,
                                       const Partition& p, PairConvention convention = kQualityPairConvention) {
  if (p.size() != segments.size()) throw InputError("partition does not match the segment list");
  const auto& net = ds.network();
  std::vector<std::vector<std::uint32_t>> clusters(p.K);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (!net.has_segment(segments[k])) {
      throw InputError("segment " + std::to_string(segments[k].value) + " is not in the network");
    }
    clusters[p.membership[k]].push_back(static_cast<std::uint32_t>(net.segment_index(segments[k])));
  }

  QualityReport rep;
  rep.K = p.K;
  rep.per_cluster.assign(p.K, 0.0);
  constexpr std::uint32_t kOut = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> local(net.segment_count(), kOut);
  std::vector<std::uint32_t> shared;
  std::vector<std::uint32_t> touched;
  for (std::size_t c = 0; c < p.K; ++c) {
    const auto& members = clusters[c];
    if (members.empty()) continue;
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<std::uint32_t>(i);
    shared.assign(members.size(), 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      touched.clear();
      for (const Visit& visit : ds.visits_at(members[i])) {
        for (const SegmentCount& sc : ds.profile(visit.trajectory)) {
          const auto j = local[sc.segment];
          if (j == kOut || j <= i) continue;
          if (shared[j] == 0) touched.push_back(j);
          ++shared[j];
        }
      }
      const double df_i = static_cast<double>(ds.visits_at(members[i]).size());
      for (auto j : touched) {
        const double df_j = static_cast<double>(ds.visits_at(members[j]).size());
        const double inter = static_cast<double>(shared[j]);
        sum += inter / (df_i + df_j - inter);
        shared[j] = 0;
      }
    }
    double self = 0.0;
    for (auto s : members) self += ds.visits_at(s).empty() ? 0.0 : 1.0;
    switch (convention) {
      case PairConvention::Unordered: break;
      case PairConvention::Ordered: sum *= 2.0; break;
      case PairConvention::OrderedWithSelf: sum = 2.0 * sum + self; break;
    }
    rep.per_cluster[c] = sum / static_cast<double>(members.size());
    for (auto s : members) local[s] = kOut;
  }
  for (double q : rep.per_cluster) rep.total += q;
  return rep;
}

/// Writes `cluster,quality` rows followed by a `total,<value>` line.
inline void write_quality_report(std::ostream& os, const QualityReport& rep) {
  os << "cluster,quality\n";
  for (std::size_t c = 0; c < rep.per_cluster.size(); ++c) os << c << ',' << detail::format_real(rep.per_cluster[c]) << '\n';
  os << "total," << detail::format_real(rep.total) << '\n';
}

/// Trajectory-cluster × segment-cluster interaction table.
struct CrossedMatrix {
  std::size_t rows = 0;  ///< trajectory clusters
  std::size_t cols = 0;  ///< segment clusters
  std::vector<std::size_t> row_sizes;
  std::vector<std::size_t> col_sizes;
  std::vector<std::uint64_t> counts;  ///< row-major
  std::vector<double> densities;      ///< count / (|row cluster| · |col cluster|)

  std::uint64_t count(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
  double density(std::size_t r, std::size_t c) const { return densities[r * cols + c]; }

  friend bool operator==(const CrossedMatrix&, const CrossedMatrix&) = default;
};

/// cell(r, c).count = number of (T, s) with T in trajectory cluster r, s in
/// segment cluster c, and T visiting s (distinct segments only).
inline CrossedMatrix crossed_matrix(const TrajectoryDataset& ds, std::span<const TrajectoryId> trajectories,
                                   const Partition& tp, std::span<const SegmentId> segments, const Partition& sp) {
  if (tp.size() != trajectories.size() || sp.size() != segments.size()) {
    throw InputError("partition sizes do not match their id lists");
  }
  const auto& net = ds.network();
  CrossedMatrix cm;
  cm.rows = tp.K;
  cm.cols = sp.K;
  cm.row_sizes.assign(tp.K, 0);
  cm.col_sizes.assign(sp.K, 0);
  cm.counts.assign(tp.K * sp.K, 0);
  constexpr std::uint32_t kOut = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> seg_cluster(net.segment_count(), kOut);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    seg_cluster[net.segment_index(segments[k])] = sp.membership[k];
    ++cm.col_sizes[sp.membership[k]];
  }
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const std::size_t r = tp.membership[k];
    ++cm.row_sizes[r];
    for (const SegmentCount& sc : ds.profile(ds.trajectory_index(trajectories[k]))) {
      const auto c = seg_cluster[sc.segment];
      if (c != kOut) ++cm.counts[r * cm.cols + c];
    }
  }
  cm.densities.assign(cm.counts.size(), 0.0);
  for (std::size_t r = 0; r < cm.rows; ++r) {
    for (std::size_t c = 0; c < cm.cols; ++c) {
      const double cells = static_cast<double>(cm.row_sizes[r]) * static_cast<double>(cm.col_sizes[c]);
      if (cells > 0.0) cm.densities[r * cm.cols + c] = static_cast<double>(cm.count(r, c)) / cells;
    }
  }
  return cm;
}

/// CSV: header `trajectory_cluster,<segment cluster ids...>`, then one row of
/// densities per trajectory cluster.
inline void write_crossed_matrix(std::ostream& os, const CrossedMatrix& cm) {
  os << "trajectory_cluster";
  for (std::size_t c = 0; c < cm.cols; ++c) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < cm.rows; ++r) {
    os << r;
    for (std::size_t c = 0; c < cm.cols; ++c) os << ',' << detail::format_real(cm.density(r, c));
    os << '\n';
  }
}

struct BoundingBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

struct ClusterSummary {
  std::size_t node = 0;        ///< hierarchy node id
  std::size_t size = 0;        ///< member count
  std::size_t coverage = 0;    ///< distinct visiting trajectories (segment clusters) or visited segments (trajectory clusters)
  double internal_weight = 0;  ///< Σ of similarity edge weights inside the cluster
  BoundingBox bbox;            ///< over endpoints of member (or visited) segments
};

namespace detail {

inline double internal_weight(const WeightedGraph& g, std::span<const std::uint32_t> members) {
  std::vector<char> in(g.vertex_count(), 0);
  for (auto v : members) in[v] = 1;
  double sum = 0.0;
  for (auto v : members) {
    auto nb = g.neighbors(v);
    auto w = g.neighbor_weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (in[nb[e]] && v < nb[e]) sum += w[e];
    }
  }
  return sum;
}

inline BoundingBox bounding_box(const RoadNetwork& net, std::span<const std::uint32_t> segment_positions) {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto sp : segment_positions) {
    const Segment& s = net.segments()[sp];
    for (NodeId end : {s.from, s.to}) {
      const Node& n = net.node(end);
      b.min_x = std::min(b.min_x, n.x);
      b.min_y = std::min(b.min_y, n.y);
      b.max_x = std::max(b.max_x, n.x);
      b.max_y = std::max(b.max_y, n.y);
    }
  }
  if (segment_positions.empty()) b = {};
  return b;
}

}  // namespace detail

/// Per-cluster summary of a segment hierarchy at `level`. Throws on an
/// unknown level.
inline std::vector<ClusterSummary> cluster_summary(const TrajectoryDataset& ds, const SegmentGraph& g,
                                                   const ClusterHierarchy& h, int level) {
  const auto& net = ds.network();
  std::vector<ClusterSummary> out;
  for (std::size_t id : h.clusters_at(level)) {
    const auto& members = h.nodes[id].vertices;
    ClusterSummary s;
    s.node = id;
    s.size = members.size();
    std::vector<std::uint32_t> positions;
    std::vector<std::uint32_t> visitors;
    for (auto v : members) {
      const auto sp = static_cast<std::uint32_t>(net.segment_index(g.vertices[v]));
      positions.push_back(sp);
      for (const Visit& visit : ds.visits_at(sp)) visitors.push_back(visit.trajectory);
    }
    std::sort(visitors.begin(), visitors.end());
    s.coverage = static_cast<std::size_t>(std::unique(visitors.begin(), visitors.end()) - visitors.begin());
    s.internal_weight = detail::internal_weight(g.graph, members);
    s.bbox = detail::bounding_box(net, positions);
    out.push_back(s);
  }
  return out;
}

/// Per-cluster summary of a trajectory hierarchy at `level`.
inline std::vector<ClusterSummary> trajectory_cluster_summary(const TrajectoryDataset& ds, const TrajectoryGraph& g,
                                                              const ClusterHierarchy& h, int level) {
  std::vector<ClusterSummary> out;
  for (std::size_t id : h.clusters_at(level)) {
    const auto& members = h.nodes[id].vertices;
    ClusterSummary s;
    s.node = id;
    s.size = members.size();
    std::vector<std::uint32_t> positions;
    for (auto v : members) {
      for (const SegmentCount& sc : ds.profile(ds.trajectory_index(g.vertices[v]))) positions.push_back(sc.segment);
    }
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    s.coverage = positions.size();
    s.internal_weight = detail::internal_weight(g.graph, members);
    s.bbox = detail::bounding_box(ds.network(), positions);
    out.push_back(s);
  }
  return out;
}

/// Adjusted Rand index between two labelings of the same items.
inline double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw InputError("labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> joint;
  std::map<std::uint32_t, std::uint64_t> ca, cb;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++ca[a[i]];
    ++cb[b[i]];
  }
  auto pairs = [](std::uint64_t x) { return static_cast<double>(x) * static_cast<double>(x - (x > 0)) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, c] : joint) index += pairs(c);
  for (const auto& [k, c] : ca) sa += pairs(c);
  for (const auto& [k, c] : cb) sb += pairs(c);
  const double total = pairs(n);
  const double expected = sa * sb / total;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace netseg
