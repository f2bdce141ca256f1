#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "netseg/error.hpp"
#include "netseg/random.hpp"
#include "netseg/road_network.hpp"
#include "netseg/trajectory_store.hpp"

namespace netseg {

/// Synthetic moving-object generator settings.
///
/// Each archetype is an origin/destination node pair. Trajectories are
/// assigned to archetypes round-robin, so planted cluster sizes are balanced.
struct GeneratorConfig {
  std::size_t n_trajectories = 100;
  std::size_t n_archetypes = 5;
  double detour_probability = 0.05;
  std::size_t od_jitter = 1;  ///< max hops origin/destination drift from the archetype
  std::uint64_t seed = 1;
  /// Optional node pools: archetype a samples both endpoints from
  /// regions[a % regions.size()]. Empty means the whole network.
  std::vector<std::vector<NodeId>> regions;
  std::size_t max_od_attempts = 100;
};

struct GeneratedDataset {
  TrajectoryDataset dataset;
  std::vector<std::pair<NodeId, NodeId>> archetypes;
  std::vector<std::size_t> archetype_of;  ///< per trajectory position
};

namespace detail {

inline void check_config(const GeneratorConfig& cfg) {
  if (cfg.n_archetypes < 1) throw InputError("generator needs at least one archetype");
  if (!(cfg.detour_probability >= 0.0 && cfg.detour_probability <= 1.0)) {
    throw InputError("detour probability must lie in [0, 1]");
  }
  for (const auto& region : cfg.regions) {
    if (region.empty()) throw InputError("generator region is empty");
  }
}

/// Random forward walk of up to `hops` steps; stops early at sinks.
inline NodeId drift(const RoadNetwork& net, NodeId start, std::size_t max_hops, Rng& rng) {
  const std::size_t hops = max_hops == 0 ? 0 : rng.below(max_hops + 1);
  NodeId at = start;
  for (std::size_t h = 0; h < hops; ++h) {
    auto out = net.out_segments(at);
    if (out.empty()) break;
    at = net.segment(out[rng.below(out.size())]).to;
  }
  return at;
}

/// Follows shortest paths from `from` to `to`, taking a random outgoing
/// segment with probability `detour` at each node and re-routing afterwards.
/// Detours that would make the destination unreachable are skipped.
inline std::vector<SegmentId> route(const RoadNetwork& net, NodeId from, NodeId to, double detour, Rng& rng) {
  std::vector<SegmentId> out;
  auto path = *net.shortest_path(from, to);
  const std::size_t detour_budget = 4 * path.size() + 16;
  std::size_t step = 0;
  NodeId at = from;
  while (at != to) {
    if (out.size() < detour_budget && detour > 0.0 && rng.bernoulli(detour)) {
      auto choices = net.out_segments(at);
      const SegmentId pick = choices[rng.below(choices.size())];
      const NodeId next = net.segment(pick).to;
      if (auto rerouted = net.shortest_path(next, to)) {
        out.push_back(pick);
        at = next;
        path = std::move(*rerouted);
        step = 0;
        continue;
      }
    }
    const SegmentId s = path[step++];
    out.push_back(s);
    at = net.segment(s).to;
  }
  return out;
}

}  // namespace detail

/// Generates a dataset deterministically from (network, config).
///
/// Throws InputError when an archetype cannot find a reachable
/// origin/destination pair within `max_od_attempts` samples.
inline GeneratedDataset generate_dataset(std::shared_ptr<const RoadNetwork> network, const GeneratorConfig& cfg) {
  detail::check_config(cfg);
  const RoadNetwork& net = *network;
  GeneratedDataset gen;
  if (cfg.n_trajectories == 0) {
    gen.dataset = TrajectoryDataset(std::move(network), {});
    return gen;
  }
  if (net.node_count() < 2) throw InputError("network too small to generate trajectories");

  Rng rng(cfg.seed);
  std::vector<NodeId> all_nodes;
  for (const auto& n : net.nodes()) all_nodes.push_back(n.id);

  for (std::size_t a = 0; a < cfg.n_archetypes; ++a) {
    const auto& pool = cfg.regions.empty() ? all_nodes : cfg.regions[a % cfg.regions.size()];
    std::optional<std::pair<NodeId, NodeId>> found;
    for (std::size_t attempt = 0; attempt < cfg.max_od_attempts && !found; ++attempt) {
      const NodeId o = pool[rng.below(pool.size())];
      const NodeId d = pool[rng.below(pool.size())];
      if (o == d) continue;
      if (net.shortest_path(o, d)) found.emplace(o, d);
    }
    if (!found) {
      throw InputError("archetype " + std::to_string(a) + ": no reachable origin/destination pair after " +
                       std::to_string(cfg.max_od_attempts) + " attempts");
    }
    gen.archetypes.push_back(*found);
  }

  std::vector<Trajectory> trajectories;
  trajectories.reserve(cfg.n_trajectories);
  for (std::size_t i = 0; i < cfg.n_trajectories; ++i) {
    const std::size_t a = i % cfg.n_archetypes;
    auto [origin, dest] = gen.archetypes[a];
    NodeId o = origin;
    NodeId d = dest;
    if (cfg.od_jitter > 0) {
      const NodeId jo = detail::drift(net, origin, cfg.od_jitter, rng);
      const NodeId jd = detail::drift(net, dest, cfg.od_jitter, rng);
      if (jo != jd && net.shortest_path(jo, jd)) {
        o = jo;
        d = jd;
      }
    }
    trajectories.push_back({TrajectoryId{i}, detail::route(net, o, d, cfg.detour_probability, rng)});
    gen.archetype_of.push_back(a);
  }
  gen.dataset = TrajectoryDataset(std::move(network), std::move(trajectories));
  return gen;
}

/// Ground-truth sidecar: `trajectory_id;archetype_id` per line.
inline void write_ground_truth(std::ostream& os, const GeneratedDataset& gen) {
  auto trajs = gen.dataset.trajectories();
  for (std::size_t i = 0; i < trajs.size(); ++i) os << trajs[i].id.value << ';' << gen.archetype_of[i] << '\n';
}

}  // namespace netseg
