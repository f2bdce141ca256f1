#pragma once

#include <algorithm>
#include <tuple>

// Shared test fixtures: small graphs, networks and datasets.

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "netseg/random.hpp"
#include "netseg/road_network.hpp"
#include "netseg/scenarios.hpp"
#include "netseg/trajectory_store.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg::testing {

/// Two unit-weight triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline WeightedGraph two_triangles() {
  return WeightedGraph(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}, {2, 3, 1.0}});
}

/// Disjoint unit-weight cliques of the given sizes, optionally chained by
/// single bridges of weight `bridge` between consecutive cliques.
inline WeightedGraph cliques(const std::vector<std::size_t>& sizes, double bridge = 0.0) {
  std::vector<WeightedEdge> edges;
  std::uint32_t base = 0;
  std::vector<std::uint32_t> starts;
  for (auto s : sizes) {
    starts.push_back(base);
    for (std::uint32_t i = 0; i < s; ++i) {
      for (std::uint32_t j = i + 1; j < s; ++j) edges.push_back({base + i, base + j, 1.0});
    }
    base += static_cast<std::uint32_t>(s);
  }
  if (bridge > 0.0) {
    for (std::size_t c = 0; c + 1 < sizes.size(); ++c) {
      edges.push_back({starts[c] + static_cast<std::uint32_t>(sizes[c]) - 1, starts[c + 1], bridge});
    }
  }
  return WeightedGraph(base, std::move(edges));
}

/// Erdős–Rényi style graph with uniform random weights in (0, 1].
inline WeightedGraph random_graph(std::size_t n, double density, Rng& rng) {
  std::vector<WeightedEdge> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(density)) edges.push_back({i, j, 1.0 - rng.uniform()});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

/// Disjoint random connected blobs: each component is a random spanning
/// tree plus extra random edges, so the component count is known.
inline WeightedGraph disconnected_graph(std::size_t components, Rng& rng, std::vector<std::uint32_t>* truth) {
  std::vector<WeightedEdge> edges;
  std::uint32_t base = 0;
  truth->clear();
  for (std::size_t c = 0; c < components; ++c) {
    const auto size = static_cast<std::uint32_t>(3 + rng.below(10));
    for (std::uint32_t i = 1; i < size; ++i) {
      edges.push_back({base + static_cast<std::uint32_t>(rng.below(i)), base + i, 0.1 + rng.uniform()});
    }
    for (std::uint32_t i = 0; i < size; ++i) {
      for (std::uint32_t j = i + 1; j < size; ++j) {
        if (rng.bernoulli(0.3)) edges.push_back({base + i, base + j, 0.1 + rng.uniform()});
      }
    }
    for (std::uint32_t i = 0; i < size; ++i) truth->push_back(static_cast<std::uint32_t>(c));
    base += size;
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  edges.erase(std::unique(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  return WeightedGraph(base, std::move(edges));
}

/// Directed chain 0 -> 1 -> ... -> n with segment i = (i, i+1).
inline std::shared_ptr<RoadNetwork> chain_network(std::size_t segments) {
  std::vector<Node> nodes;
  std::vector<Segment> segs;
  for (std::size_t i = 0; i <= segments; ++i) nodes.push_back({NodeId{i}, static_cast<double>(i), 0.0});
  for (std::size_t i = 0; i < segments; ++i) segs.push_back({SegmentId{i}, NodeId{i}, NodeId{i + 1}});
  return std::make_shared<RoadNetwork>(std::move(nodes), std::move(segs));
}

inline std::shared_ptr<RoadNetwork> grid_network(std::size_t rows, std::size_t cols) {
  return make_grid_network(rows, cols);
}

using netseg::RegionNetwork;

inline RegionNetwork region_network(std::size_t regions, std::size_t side, bool linked) {
  return make_region_network(regions, side, linked);
}

inline TrajectoryDataset dataset_from_text(std::shared_ptr<const RoadNetwork> net, const std::string& text) {
  std::istringstream in(text);
  return load_trajectories(std::move(net), in);
}

}  // namespace netseg::testing
