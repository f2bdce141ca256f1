#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netseg/detail/text.hpp"
#include "netseg/error.hpp"
#include "netseg/ids.hpp"
#include "netseg/road_network.hpp"

namespace netseg {

/// Map-matched trajectory: an ordered, chain-connected sequence of segments.
struct Trajectory {
  TrajectoryId id;
  std::vector<SegmentId> segments;
};

/// One entry of the segment -> trajectory inverted index.
struct Visit {
  std::uint32_t trajectory;  ///< position in TrajectoryDataset::trajectories()
  std::uint32_t count;       ///< n_{s,T}: times the trajectory traverses the segment
};

/// One entry of a trajectory's distinct-segment profile.
struct SegmentCount {
  std::uint32_t segment;  ///< position in RoadNetwork::segments()
  std::uint32_t count;
};

/// Validated set of trajectories over a road network, with the inverted index.
///
/// Trajectories keep their input order. Per-segment visit lists are sorted by
/// trajectory position; per-trajectory profiles are sorted by segment position.
class TrajectoryDataset {
 public:
  TrajectoryDataset() : network_(std::make_shared<RoadNetwork>()) {}

  TrajectoryDataset(std::shared_ptr<const RoadNetwork> network, std::vector<Trajectory> trajectories)
      : network_(std::move(network)), trajectories_(std::move(trajectories)) {
    const RoadNetwork& net = *network_;
    if (trajectories_.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw InputError("too many trajectories");
    }
    index_.reserve(trajectories_.size());
    profiles_.resize(trajectories_.size());
    visits_.assign(net.segment_count(), {});
    totals_.assign(net.segment_count(), 0);

    std::vector<std::uint32_t> positions;
    for (std::size_t t = 0; t < trajectories_.size(); ++t) {
      const Trajectory& traj = trajectories_[t];
      if (!index_.emplace(traj.id, t).second) {
        throw InputError("duplicate trajectory id " + std::to_string(traj.id.value));
      }
      if (traj.segments.empty()) {
        throw InputError("trajectory " + std::to_string(traj.id.value) + " is empty");
      }
      positions.clear();
      for (std::size_t i = 0; i < traj.segments.size(); ++i) {
        const SegmentId s = traj.segments[i];
        if (!net.has_segment(s)) {
          throw InputError("trajectory " + std::to_string(traj.id.value) + " references unknown segment " +
                           std::to_string(s.value) + " at position " + std::to_string(i));
        }
        if (i > 0 && !net.connected(traj.segments[i - 1], s)) {
          throw InputError("trajectory " + std::to_string(traj.id.value) + " breaks the chain at position " +
                           std::to_string(i - 1) + " (segment " + std::to_string(traj.segments[i - 1].value) +
                           " -> " + std::to_string(s.value) + ")");
        }
        positions.push_back(static_cast<std::uint32_t>(net.segment_index(s)));
      }
      std::sort(positions.begin(), positions.end());
      auto& profile = profiles_[t];
      for (std::size_t i = 0; i < positions.size();) {
        std::size_t j = i;
        while (j < positions.size() && positions[j] == positions[i]) ++j;
        profile.push_back({positions[i], static_cast<std::uint32_t>(j - i)});
        i = j;
      }
      for (const auto& sc : profile) {
        visits_[sc.segment].push_back({static_cast<std::uint32_t>(t), sc.count});
        totals_[sc.segment] += sc.count;
      }
    }
    for (std::size_t s = 0; s < visits_.size(); ++s) {
      if (!visits_[s].empty()) visited_.push_back(static_cast<std::uint32_t>(s));
    }
  }

  const RoadNetwork& network() const { return *network_; }
  const std::shared_ptr<const RoadNetwork>& network_ptr() const { return network_; }

  std::span<const Trajectory> trajectories() const { return trajectories_; }
  std::size_t size() const { return trajectories_.size(); }
  bool empty() const { return trajectories_.empty(); }

  bool has_trajectory(TrajectoryId id) const { return index_.contains(id); }

  std::size_t trajectory_index(TrajectoryId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown trajectory id " + std::to_string(id.value));
    return it->second;
  }

  /// Inverted index entry of a segment (by network position).
  std::span<const Visit> visits_at(std::size_t segment_pos) const { return visits_[segment_pos]; }
  std::span<const Visit> visits(SegmentId s) const { return visits_[network_->segment_index(s)]; }

  /// Σ_T n_{s,T} for a segment position.
  std::uint64_t total_visits_at(std::size_t segment_pos) const { return totals_[segment_pos]; }

  /// Distinct segments of a trajectory (by dataset position) with visit counts.
  std::span<const SegmentCount> profile(std::size_t trajectory_pos) const { return profiles_[trajectory_pos]; }

  /// n_{s,T}.
  std::uint32_t count(TrajectoryId t, SegmentId s) const {
    const auto& prof = profiles_[trajectory_index(t)];
    const auto pos = static_cast<std::uint32_t>(network_->segment_index(s));
    auto it = std::lower_bound(prof.begin(), prof.end(), pos,
                               [](const SegmentCount& sc, std::uint32_t p) { return sc.segment < p; });
    return (it != prof.end() && it->segment == pos) ? it->count : 0;
  }

  /// Positions of segments visited by at least one trajectory, ascending.
  std::span<const std::uint32_t> visited_segments() const { return visited_; }

 private:
  std::shared_ptr<const RoadNetwork> network_;
  std::vector<Trajectory> trajectories_;
  std::unordered_map<TrajectoryId, std::size_t> index_;
  std::vector<std::vector<SegmentCount>> profiles_;
  std::vector<std::vector<Visit>> visits_;
  std::vector<std::uint64_t> totals_;
  std::vector<std::uint32_t> visited_;
};

/// Parses the trajectory CSV: one `trajectory_id;seg_1,seg_2,...` per line.
inline TrajectoryDataset load_trajectories(std::shared_ptr<const RoadNetwork> network, std::istream& source) {
  using namespace detail;
  std::vector<Trajectory> out;
  std::unordered_map<TrajectoryId, std::size_t> seen;
  LineReader reader(source);
  std::string_view line;
  while (reader.next(line)) {
    const auto semi = line.find(';');
    if (semi == std::string_view::npos) throw ParseError(reader.line(), "expected 'id;segments'");
    Trajectory t;
    t.id = TrajectoryId{parse_u64(trim(line.substr(0, semi)), reader.line(), "trajectory id")};
    if (auto [it, fresh] = seen.emplace(t.id, reader.line()); !fresh) {
      throw ParseError(reader.line(), "duplicate trajectory id " + std::to_string(t.id.value));
    }
    const auto body = trim(line.substr(semi + 1));
    if (body.empty()) throw ParseError(reader.line(), "trajectory " + std::to_string(t.id.value) + " is empty");
    for (auto field : split(body, ',')) {
      const SegmentId s{parse_u64(field, reader.line(), "segment id")};
      if (!network->has_segment(s)) {
        throw ParseError(reader.line(), "trajectory " + std::to_string(t.id.value) +
                                            " references unknown segment " + std::to_string(s.value) +
                                            " at position " + std::to_string(t.segments.size()));
      }
      if (!t.segments.empty() && !network->connected(t.segments.back(), s)) {
        throw ParseError(reader.line(), "trajectory " + std::to_string(t.id.value) +
                                            " breaks the chain at position " +
                                            std::to_string(t.segments.size() - 1));
      }
      t.segments.push_back(s);
    }
    out.push_back(std::move(t));
  }
  return TrajectoryDataset(std::move(network), std::move(out));
}

inline void write_trajectories(std::ostream& os, const TrajectoryDataset& ds) {
  for (const auto& t : ds.trajectories()) {
    os << t.id.value << ';';
    for (std::size_t i = 0; i < t.segments.size(); ++i) {
      if (i) os << ',';
      os << t.segments[i].value;
    }
    os << '\n';
  }
}

struct DatasetStats {
  std::size_t trajectories = 0;
  std::size_t distinct_segments = 0;
  std::size_t min_length = 0;
  double mean_length = 0.0;
  std::size_t max_length = 0;
};

inline DatasetStats dataset_stats(const TrajectoryDataset& ds) {
  DatasetStats st;
  st.trajectories = ds.size();
  st.distinct_segments = ds.visited_segments().size();
  if (ds.empty()) return st;
  st.min_length = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  for (const auto& t : ds.trajectories()) {
    st.min_length = std::min(st.min_length, t.segments.size());
    st.max_length = std::max(st.max_length, t.segments.size());
    total += t.segments.size();
  }
  st.mean_length = static_cast<double>(total) / static_cast<double>(ds.size());
  return st;
}

}  // namespace netseg
