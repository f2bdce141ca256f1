#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netseg/detail/text.hpp"
#include "netseg/error.hpp"
#include "netseg/ids.hpp"

namespace netseg {

struct Node {
  NodeId id;
  double x = 0.0;
  double y = 0.0;
};

/// Directed road segment: travelable from `from` towards `to` only.
struct Segment {
  SegmentId id;
  NodeId from;
  NodeId to;
};

/// Directed road network G = (V, S).
///
/// Nodes and segments are stored sorted by id, so positions follow id order.
/// Ids are kept as supplied (never re-indexed). Parallel segments are allowed,
/// self-loops are not. Immutable after construction.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  /// Validates and indexes the given nodes and segments. Throws InputError on
  /// duplicate ids, non-finite coordinates, self-loops and dangling endpoints.
  RoadNetwork(std::vector<Node> nodes, std::vector<Segment> segments)
      : nodes_(std::move(nodes)), segments_(std::move(segments)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.id < b.id; });

    node_pos_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y)) {
        throw InputError("node " + std::to_string(nodes_[i].id.value) + " has non-finite coordinates");
      }
      if (!node_pos_.emplace(nodes_[i].id, i).second) {
        throw InputError("duplicate node id " + std::to_string(nodes_[i].id.value));
      }
    }
    segment_pos_.reserve(segments_.size());
    out_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      if (!segment_pos_.emplace(s.id, i).second) {
        throw InputError("duplicate segment id " + std::to_string(s.id.value));
      }
      check_segment(s);
      // Segments are visited in id order, so each adjacency list ends up sorted.
      out_[node_pos_.at(s.from)].push_back(s.id);
    }
  }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Segment> segments() const { return segments_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t segment_count() const { return segments_.size(); }

  bool has_node(NodeId id) const { return node_pos_.contains(id); }
  bool has_segment(SegmentId id) const { return segment_pos_.contains(id); }

  std::size_t node_index(NodeId id) const {
    auto it = node_pos_.find(id);
    if (it == node_pos_.end()) throw InputError("unknown node id " + std::to_string(id.value));
    return it->second;
  }

  std::size_t segment_index(SegmentId id) const {
    auto it = segment_pos_.find(id);
    if (it == segment_pos_.end()) throw InputError("unknown segment id " + std::to_string(id.value));
    return it->second;
  }

  const Node& node(NodeId id) const { return nodes_[node_index(id)]; }
  const Segment& segment(SegmentId id) const { return segments_[segment_index(id)]; }

  /// Outgoing segments of a node, ascending by id.
  std::span<const SegmentId> out_segments(NodeId id) const { return out_[node_index(id)]; }

  /// Segments that can directly follow `s`: those leaving s's head node.
  std::vector<SegmentId> successors(SegmentId s) const {
    auto out = out_segments(segment(s).to);
    return {out.begin(), out.end()};
  }

  bool connected(SegmentId a, SegmentId b) const { return segment(a).to == segment(b).from; }

  /// Minimum-hop directed path from `a` to `b`, or nullopt when unreachable.
  /// Breadth-first, expanding outgoing segments in ascending id order; the first
  /// discovery of a node wins, which makes tie-breaking deterministic.
  std::optional<std::vector<SegmentId>> shortest_path(NodeId a, NodeId b) const {
    const std::size_t src = node_index(a);
    const std::size_t dst = node_index(b);
    if (src == dst) return std::vector<SegmentId>{};

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> via(nodes_.size(), kNone);  // segment position used to reach the node
    std::vector<char> seen(nodes_.size(), 0);
    std::queue<std::size_t> frontier;
    seen[src] = 1;
    frontier.push(src);
    while (!frontier.empty() && !seen[dst]) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (SegmentId sid : out_[u]) {
        const std::size_t sp = segment_pos_.at(sid);
        const std::size_t v = node_pos_.at(segments_[sp].to);
        if (seen[v]) continue;
        seen[v] = 1;
        via[v] = sp;
        frontier.push(v);
      }
    }
    if (!seen[dst]) return std::nullopt;

    std::vector<SegmentId> path;
    for (std::size_t v = dst; v != src;) {
      const Segment& s = segments_[via[v]];
      path.push_back(s.id);
      v = node_pos_.at(s.from);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// Number of segments sharing (from, to) with a lower-id segment.
  std::size_t parallel_segment_count() const {
    std::vector<std::pair<NodeId, NodeId>> ends;
    ends.reserve(segments_.size());
    for (const auto& s : segments_) ends.emplace_back(s.from, s.to);
    std::sort(ends.begin(), ends.end());
    std::size_t dup = 0;
    for (std::size_t i = 1; i < ends.size(); ++i) dup += ends[i] == ends[i - 1];
    return dup;
  }

 private:
  void check_segment(const Segment& s) const {
    if (s.from == s.to) {
      throw InputError("segment " + std::to_string(s.id.value) + " is a self-loop on node " +
                       std::to_string(s.from.value));
    }
    for (NodeId end : {s.from, s.to}) {
      if (!node_pos_.contains(end)) {
        throw InputError("segment " + std::to_string(s.id.value) + " references unknown node " +
                         std::to_string(end.value));
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  std::unordered_map<NodeId, std::size_t> node_pos_;
  std::unordered_map<SegmentId, std::size_t> segment_pos_;
  std::vector<std::vector<SegmentId>> out_;
};

/// Reads a network from the nodes CSV (`node_id,x,y`) and segments CSV
/// (`segment_id,from_node,to_node`). Errors carry the offending line number.
inline RoadNetwork load_network(std::istream& node_source, std::istream& segment_source) {
  using namespace detail;
  std::vector<Node> nodes;
  {
    LineReader reader(node_source);
    expect_header(reader, "node_id,x,y");
    std::unordered_map<NodeId, std::size_t> seen;
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, ',');
      if (f.size() != 3) throw ParseError(reader.line(), "expected 3 fields in nodes row");
      Node n{NodeId{parse_u64(f[0], reader.line(), "node id")}, parse_f64(f[1], reader.line(), "x"),
             parse_f64(f[2], reader.line(), "y")};
      if (auto [it, fresh] = seen.emplace(n.id, reader.line()); !fresh) {
        throw ParseError(reader.line(), "duplicate node id " + std::to_string(n.id.value) +
                                            " (first seen on line " + std::to_string(it->second) + ")");
      }
      nodes.push_back(n);
    }
  }
  std::unordered_map<NodeId, char> known;
  for (const auto& n : nodes) known.emplace(n.id, 1);

  std::vector<Segment> segments;
  {
    LineReader reader(segment_source);
    expect_header(reader, "segment_id,from_node,to_node");
    std::unordered_map<SegmentId, std::size_t> seen;
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, ',');
      if (f.size() != 3) throw ParseError(reader.line(), "expected 3 fields in segments row");
      Segment s{SegmentId{parse_u64(f[0], reader.line(), "segment id")},
                NodeId{parse_u64(f[1], reader.line(), "from_node")},
                NodeId{parse_u64(f[2], reader.line(), "to_node")}};
      if (auto [it, fresh] = seen.emplace(s.id, reader.line()); !fresh) {
        throw ParseError(reader.line(), "duplicate segment id " + std::to_string(s.id.value) +
                                            " (first seen on line " + std::to_string(it->second) + ")");
      }
      if (s.from == s.to) {
        throw ParseError(reader.line(), "segment " + std::to_string(s.id.value) + " is a self-loop");
      }
      for (NodeId end : {s.from, s.to}) {
        if (!known.contains(end)) {
          throw ParseError(reader.line(), "segment " + std::to_string(s.id.value) +
                                              " references unknown node " + std::to_string(end.value));
        }
      }
      segments.push_back(s);
    }
  }
  return RoadNetwork(std::move(nodes), std::move(segments));
}

/// Writes the nodes CSV and the segments CSV in the format load_network reads.
inline void write_network(std::ostream& node_out, std::ostream& segment_out, const RoadNetwork& net) {
  node_out << "node_id,x,y\n";
  for (const auto& n : net.nodes()) {
    node_out << n.id.value << ',' << detail::format_exact(n.x) << ',' << detail::format_exact(n.y) << '\n';
  }
  segment_out << "segment_id,from_node,to_node\n";
  for (const auto& s : net.segments()) segment_out << s.id.value << ',' << s.from.value << ',' << s.to.value << '\n';
}

}  // namespace netseg
