#pragma once

// Synthetic road networks and hand-built datasets with known cluster
// structure, shared by the CLI, the test suite and the acceptance run.

#include <cstdint>
#include <memory>
#include <vector>

#include "netseg/error.hpp"
#include "netseg/generator.hpp"
#include "netseg/random.hpp"
#include "netseg/road_network.hpp"
#include "netseg/trajectory_store.hpp"

namespace netseg {

namespace detail {

/// Appends a rows × cols grid with a segment in each direction between
/// 4-neighbors. Node (r, c) gets id offset + r·cols + c; segment ids
/// continue after the last existing one.
inline void append_grid(std::vector<Node>& nodes, std::vector<Segment>& segs, std::size_t rows, std::size_t cols,
                        std::uint64_t offset, double x0 = 0.0, double y0 = 0.0) {
  std::uint64_t sid = segs.empty() ? 0 : segs.back().id.value + 1;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      nodes.push_back({NodeId{offset + r * cols + c}, x0 + static_cast<double>(c), y0 + static_cast<double>(r)});
    }
  }
  auto id = [&](std::size_t r, std::size_t c) { return NodeId{offset + r * cols + c}; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        segs.push_back({SegmentId{sid++}, id(r, c), id(r, c + 1)});
        segs.push_back({SegmentId{sid++}, id(r, c + 1), id(r, c)});
      }
      if (r + 1 < rows) {
        segs.push_back({SegmentId{sid++}, id(r, c), id(r + 1, c)});
        segs.push_back({SegmentId{sid++}, id(r + 1, c), id(r, c)});
      }
    }
  }
}

}  // namespace detail

inline std::shared_ptr<RoadNetwork> make_grid_network(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw InputError("grid needs at least one row and one column");
  std::vector<Node> nodes;
  std::vector<Segment> segs;
  detail::append_grid(nodes, segs, rows, cols, 0);
  return std::make_shared<RoadNetwork>(std::move(nodes), std::move(segs));
}

struct RegionNetwork {
  std::shared_ptr<RoadNetwork> network;
  std::vector<std::vector<NodeId>> regions;  ///< node ids of each region
};

/// `count` square grids of side `side` placed left to right. When `linked`,
/// consecutive grids are joined by one two-way segment pair between facing
/// middle border nodes.
inline RegionNetwork make_region_network(std::size_t count, std::size_t side, bool linked) {
  if (count == 0 || side == 0) throw InputError("region network needs positive count and side");
  std::vector<Node> nodes;
  std::vector<Segment> segs;
  RegionNetwork out;
  const std::uint64_t per = side * side;
  for (std::size_t g = 0; g < count; ++g) {
    detail::append_grid(nodes, segs, side, side, g * per, static_cast<double>(g * (side + 2)), 0.0);
    std::vector<NodeId> ids;
    for (std::uint64_t k = 0; k < per; ++k) ids.push_back(NodeId{g * per + k});
    out.regions.push_back(std::move(ids));
  }
  if (linked && count > 1) {
    std::uint64_t sid = segs.empty() ? 0 : segs.back().id.value + 1;
    const std::uint64_t mid = side / 2;
    for (std::size_t g = 0; g + 1 < count; ++g) {
      const NodeId a{g * per + mid * side + (side - 1)};
      const NodeId b{(g + 1) * per + mid * side};
      segs.push_back({SegmentId{sid++}, a, b});
      segs.push_back({SegmentId{sid++}, b, a});
    }
  }
  out.network = std::make_shared<RoadNetwork>(std::move(nodes), std::move(segs));
  return out;
}

struct HubScenarioConfig {
  std::size_t clusters = 5;                ///< trajectory groups, each on its own corridor
  std::size_t trajectories_per_cluster = 20;
  std::size_t corridor_length = 8;         ///< segments before and after the hub
  std::size_t hub_length = 10;             ///< segments of the shared corridor
  std::size_t max_trim = 2;                ///< random shortening at either end
  std::uint64_t seed = 1;
};

/// Disjoint one-way corridors, one per cluster. Groups 0 and 1 both run
/// through a shared hub corridor between their own entry and exit legs, so
/// the hub segments are traversed by exactly those two groups. Every
/// trajectory follows its corridor with up to max_trim segments cut at each
/// end. archetype_of holds the group; archetypes hold corridor endpoints.
inline GeneratedDataset make_hub_scenario(const HubScenarioConfig& cfg) {
  if (cfg.clusters < 2) throw InputError("hub scenario needs at least two clusters");
  if (cfg.corridor_length < 1 || cfg.hub_length < 1) throw InputError("hub scenario needs non-empty corridors");
  if (2 * cfg.max_trim >= cfg.corridor_length + cfg.hub_length) throw InputError("trim exceeds corridor length");

  std::vector<Node> nodes;
  std::vector<Segment> segs;
  std::uint64_t next_node = 0;
  auto node = [&](double x, double y) {
    nodes.push_back({NodeId{next_node}, x, y});
    return NodeId{next_node++};
  };
  auto link = [&](NodeId a, NodeId b) {
    const SegmentId id{segs.size()};
    segs.push_back({id, a, b});
    return id;
  };
  // Straight chain of `length` segments starting at `from`, heading (dx, dy).
  auto chain = [&](NodeId from, std::size_t length, double x, double y, double dx, double dy,
                   std::vector<SegmentId>& out) {
    NodeId at = from;
    for (std::size_t i = 1; i <= length; ++i) {
      const NodeId nxt = node(x + dx * static_cast<double>(i), y + dy * static_cast<double>(i));
      out.push_back(link(at, nxt));
      at = nxt;
    }
    return at;
  };

  const double leg = static_cast<double>(cfg.corridor_length);
  const double hub = static_cast<double>(cfg.hub_length);
  const NodeId hub_start = node(leg, 0.0);
  std::vector<SegmentId> hub_segments;
  const NodeId hub_end = chain(hub_start, cfg.hub_length, leg, 0.0, 1.0, 0.0, hub_segments);

  GeneratedDataset out;
  std::vector<std::vector<SegmentId>> corridors(cfg.clusters);
  for (std::size_t k = 0; k < cfg.clusters; ++k) {
    auto& path = corridors[k];
    const double y = k < 2 ? (k == 0 ? 2.0 : -2.0) : 4.0 * static_cast<double>(k);
    if (k < 2) {
      // Entry leg converges onto the hub start; exit leg leaves from the hub end.
      const NodeId origin = node(0.0, y);
      std::vector<SegmentId> entry;
      NodeId at = chain(origin, cfg.corridor_length - 1, 0.0, y, 1.0, 0.0, entry);
      entry.push_back(link(at, hub_start));
      path.insert(path.end(), entry.begin(), entry.end());
      path.insert(path.end(), hub_segments.begin(), hub_segments.end());
      chain(hub_end, cfg.corridor_length, leg + hub, 0.0, 1.0, y / leg, path);
      out.archetypes.emplace_back(origin, segs[path.back().value].to);
    } else {
      const NodeId origin = node(0.0, y);
      chain(origin, 2 * cfg.corridor_length + cfg.hub_length, 0.0, y, 1.0, 0.0, path);
      out.archetypes.emplace_back(origin, segs[path.back().value].to);
    }
  }

  auto net = std::make_shared<RoadNetwork>(std::move(nodes), std::move(segs));
  Rng rng(cfg.seed);
  std::vector<Trajectory> trajectories;
  for (std::size_t k = 0; k < cfg.clusters; ++k) {
    const auto& path = corridors[k];
    for (std::size_t i = 0; i < cfg.trajectories_per_cluster; ++i) {
      const std::size_t head = rng.below(cfg.max_trim + 1);
      const std::size_t tail = rng.below(cfg.max_trim + 1);
      Trajectory t{TrajectoryId{trajectories.size()}, {path.begin() + head, path.end() - tail}};
      trajectories.push_back(std::move(t));
      out.archetype_of.push_back(k);
    }
  }
  out.dataset = TrajectoryDataset(net, std::move(trajectories));
  return out;
}

}  // namespace netseg
