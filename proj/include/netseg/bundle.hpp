#pragma once

// Self-contained JSON document consumed by the explorer UI: network geometry,
// trajectories, both cluster hierarchies with memberships, crossed matrices
// for every level pair and per-cluster summaries.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "netseg/error.hpp"
#include "netseg/evaluation.hpp"
#include "netseg/hierarchy.hpp"
#include "netseg/similarity.hpp"
#include "netseg/trajectory_store.hpp"

namespace netseg {

inline constexpr int kBundleSchemaVersion = 1;

struct BundleInputs {
  const TrajectoryDataset& dataset;
  const SegmentGraph& segment_graph;
  const ClusterHierarchy& segment_hierarchy;
  const TrajectoryGraph& trajectory_graph;
  const ClusterHierarchy& trajectory_hierarchy;
};

namespace detail {

template <class Id>
nlohmann::json hierarchy_json(const ClusterHierarchy& h, std::span<const Id> vertex_ids) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : h.nodes) {
    nlohmann::json j;
    j["id"] = n.id;
    j["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
    j["level"] = n.level;
    j["significant"] = n.significant;
    j["modularity"] = n.split_modularity ? nlohmann::json(*n.split_modularity) : nlohmann::json(nullptr);
    j["vertex_count"] = n.vertices.size();
    j["children"] = n.children;
    if (n.split_modularity && n.test.replicates > 0) {
      j["test"] = {{"replicates", n.test.replicates},
                   {"null_mean", n.test.null_mean},
                   {"null_stddev", n.test.null_stddev},
                   {"z", std::isfinite(n.test.z) ? nlohmann::json(n.test.z) : nlohmann::json(nullptr)}};
    }
    nodes.push_back(std::move(j));
  }
  std::vector<std::size_t> leaf(h.vertex_count, 0);
  for (const auto& n : h.nodes) {
    if (n.children.empty()) {
      for (auto v : n.vertices) leaf[v] = n.id;
    }
  }
  nlohmann::json membership = nlohmann::json::array();
  for (std::size_t v = 0; v < h.vertex_count; ++v) {
    membership.push_back({{"id", vertex_ids[v].value}, {"leaf", leaf[v]}, {"level1", h.root_of(leaf[v])}});
  }
  return {{"depth", h.depth()}, {"level_modularity", h.level_modularity}, {"nodes", nodes}, {"membership", membership}};
}

inline nlohmann::json summary_json(const std::vector<ClusterSummary>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : rows) {
    out.push_back({{"node", s.node},
                   {"size", s.size},
                   {"coverage", s.coverage},
                   {"internal_weight", s.internal_weight},
                   {"bbox", {s.bbox.min_x, s.bbox.min_y, s.bbox.max_x, s.bbox.max_y}}});
  }
  return out;
}

inline nlohmann::json crossed_json(const CrossedMatrix& cm, int trajectory_level, int segment_level,
                                   const std::vector<std::size_t>& row_nodes, const std::vector<std::size_t>& col_nodes) {
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json densities = nlohmann::json::array();
  for (std::size_t r = 0; r < cm.rows; ++r) {
    nlohmann::json c = nlohmann::json::array();
    nlohmann::json d = nlohmann::json::array();
    for (std::size_t k = 0; k < cm.cols; ++k) {
      c.push_back(cm.count(r, k));
      d.push_back(cm.density(r, k));
    }
    counts.push_back(std::move(c));
    densities.push_back(std::move(d));
  }
  return {{"trajectory_level", trajectory_level},
          {"segment_level", segment_level},
          {"rows", row_nodes},
          {"cols", col_nodes},
          {"counts", counts},
          {"densities", densities}};
}

}  // namespace detail

/// Builds the bundle document. Throws InputError when the artifacts do not
/// belong together (graphs or hierarchies of a different dataset).
inline nlohmann::json build_bundle(const BundleInputs& in) {
  const auto& ds = in.dataset;
  const auto& net = ds.network();
  if (in.segment_hierarchy.vertex_count != in.segment_graph.vertices.size()) {
    throw InputError("segment hierarchy does not match the segment graph");
  }
  if (in.trajectory_hierarchy.vertex_count != in.trajectory_graph.vertices.size()) {
    throw InputError("trajectory hierarchy does not match the trajectory graph");
  }
  for (auto s : in.segment_graph.vertices) {
    if (!net.has_segment(s)) throw InputError("segment graph vertex " + std::to_string(s.value) + " not in network");
  }
  for (auto t : in.trajectory_graph.vertices) {
    if (!ds.has_trajectory(t)) {
      throw InputError("trajectory graph vertex " + std::to_string(t.value) + " not in dataset");
    }
  }

  nlohmann::json doc;
  doc["schema_version"] = kBundleSchemaVersion;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : net.nodes()) nodes.push_back({{"id", n.id.value}, {"x", n.x}, {"y", n.y}});
  doc["nodes"] = std::move(nodes);
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : net.segments()) {
    segments.push_back({{"id", s.id.value}, {"from", s.from.value}, {"to", s.to.value}});
  }
  doc["segments"] = std::move(segments);

  const auto& th = in.trajectory_hierarchy;
  nlohmann::json trajectories = nlohmann::json::array();
  for (const auto& t : ds.trajectories()) {
    nlohmann::json j;
    j["id"] = t.id.value;
    std::vector<std::uint64_t> ids;
    for (auto s : t.segments) ids.push_back(s.value);
    j["segments"] = std::move(ids);
    const auto v = in.trajectory_graph.index_of(t.id);
    const auto leaf = th.leaf_of(static_cast<std::uint32_t>(v));
    j["leaf_cluster"] = leaf;
    j["level1_cluster"] = th.root_of(leaf);
    trajectories.push_back(std::move(j));
  }
  doc["trajectories"] = std::move(trajectories);

  doc["segment_hierarchy"] =
      detail::hierarchy_json<SegmentId>(in.segment_hierarchy, std::span<const SegmentId>(in.segment_graph.vertices));
  doc["trajectory_hierarchy"] =
      detail::hierarchy_json<TrajectoryId>(th, std::span<const TrajectoryId>(in.trajectory_graph.vertices));

  nlohmann::json crossed = nlohmann::json::array();
  for (int lt = 1; lt <= th.depth(); ++lt) {
    const auto tp = th.partition_at(lt);
    for (int ls = 1; ls <= in.segment_hierarchy.depth(); ++ls) {
      const auto cm = crossed_matrix(ds, in.trajectory_graph.vertices, tp, in.segment_graph.vertices,
                                     in.segment_hierarchy.partition_at(ls));
      crossed.push_back(detail::crossed_json(cm, lt, ls, th.clusters_at(lt), in.segment_hierarchy.clusters_at(ls)));
    }
  }
  doc["crossed_matrices"] = std::move(crossed);

  nlohmann::json seg_summaries = nlohmann::json::array();
  for (int l = 1; l <= in.segment_hierarchy.depth(); ++l) {
    seg_summaries.push_back(
        {{"level", l},
         {"clusters", detail::summary_json(cluster_summary(ds, in.segment_graph, in.segment_hierarchy, l))}});
  }
  nlohmann::json traj_summaries = nlohmann::json::array();
  for (int l = 1; l <= th.depth(); ++l) {
    traj_summaries.push_back(
        {{"level", l}, {"clusters", detail::summary_json(trajectory_cluster_summary(ds, in.trajectory_graph, th, l))}});
  }
  doc["summaries"] = {{"segment", seg_summaries}, {"trajectory", traj_summaries}};
  return doc;
}

/// Referential-integrity check of a bundle document. Returns one message per
/// problem (empty when valid); messages name the offending ids.
inline std::vector<std::string> validate_bundle(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };
  if (!doc.is_object()) return {"bundle is not a JSON object"};
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    return {"missing schema_version"};
  }
  if (doc["schema_version"].get<int>() != kBundleSchemaVersion) {
    return {"unsupported schema_version " + doc["schema_version"].dump()};
  }
  for (const char* key : {"nodes", "segments", "trajectories", "segment_hierarchy", "trajectory_hierarchy",
                          "crossed_matrices", "summaries"}) {
    if (!doc.contains(key)) fail(std::string("missing field '") + key + "'");
  }
  if (!errors.empty()) return errors;

  try {
    std::set<std::uint64_t> node_ids, segment_ids, trajectory_ids;
    for (const auto& n : doc["nodes"]) {
      if (!node_ids.insert(n.at("id").get<std::uint64_t>()).second) fail("duplicate node id " + n["id"].dump());
    }
    for (const auto& s : doc["segments"]) {
      const auto id = s.at("id").get<std::uint64_t>();
      if (!segment_ids.insert(id).second) fail("duplicate segment id " + std::to_string(id));
      for (const char* end : {"from", "to"}) {
        const auto nid = s.at(end).get<std::uint64_t>();
        if (!node_ids.contains(nid)) {
          fail("segment " + std::to_string(id) + " references unknown node id " + std::to_string(nid));
        }
      }
    }

    auto check_hierarchy = [&](const char* name, const std::set<std::uint64_t>& universe) {
      const auto& h = doc[name];
      const auto& nodes = h.at("nodes");
      const std::size_t count = nodes.size();
      for (std::size_t k = 0; k < count; ++k) {
        const auto& n = nodes[k];
        if (n.at("id").get<std::size_t>() != k) fail(std::string(name) + ": node ids must run 0..N-1");
        if (!n.at("parent").is_null() && n["parent"].get<std::size_t>() >= count) {
          fail(std::string(name) + ": node " + std::to_string(k) + " references unknown parent node id " +
               n["parent"].dump());
        }
        for (const auto& c : n.at("children")) {
          if (c.get<std::size_t>() >= count) {
            fail(std::string(name) + ": node " + std::to_string(k) + " references unknown child node id " + c.dump());
          }
        }
      }
      for (const auto& m : h.at("membership")) {
        const auto vid = m.at("id").get<std::uint64_t>();
        if (!universe.contains(vid)) fail(std::string(name) + ": membership references unknown id " + std::to_string(vid));
        for (const char* field : {"leaf", "level1"}) {
          const auto node = m.at(field).get<std::size_t>();
          if (node >= count) {
            fail(std::string(name) + ": vertex " + std::to_string(vid) + " references missing hierarchy node " +
                 std::to_string(node));
          }
        }
      }
      return count;
    };

    for (const auto& t : doc["trajectories"]) {
      const auto id = t.at("id").get<std::uint64_t>();
      if (!trajectory_ids.insert(id).second) fail("duplicate trajectory id " + std::to_string(id));
      for (const auto& s : t.at("segments")) {
        if (!segment_ids.contains(s.get<std::uint64_t>())) {
          fail("trajectory " + std::to_string(id) + " references unknown segment id " + s.dump());
        }
      }
    }
    const std::size_t seg_nodes = check_hierarchy("segment_hierarchy", segment_ids);
    const std::size_t traj_nodes = check_hierarchy("trajectory_hierarchy", trajectory_ids);
    for (const auto& t : doc["trajectories"]) {
      for (const char* field : {"leaf_cluster", "level1_cluster"}) {
        if (t.at(field).get<std::size_t>() >= traj_nodes) {
          fail("trajectory " + t["id"].dump() + " references missing hierarchy node " + t[field].dump());
        }
      }
    }
    for (const auto& cm : doc["crossed_matrices"]) {
      const auto& rows = cm.at("rows");
      const auto& cols = cm.at("cols");
      for (const auto& r : rows) {
        if (r.get<std::size_t>() >= traj_nodes) fail("crossed matrix row references missing node " + r.dump());
      }
      for (const auto& c : cols) {
        if (c.get<std::size_t>() >= seg_nodes) fail("crossed matrix column references missing node " + c.dump());
      }
      const auto& densities = cm.at("densities");
      if (densities.size() != rows.size() || cm.at("counts").size() != rows.size()) {
        fail("crossed matrix shape does not match its row list");
        continue;
      }
      for (const auto& row : densities) {
        if (row.size() != cols.size()) fail("crossed matrix shape does not match its column list");
        for (const auto& d : row) {
          if (d.get<double>() < 0.0 || d.get<double>() > 1.0) fail("crossed matrix density outside [0, 1]");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed bundle: ") + e.what());
  }
  return errors;
}

/// Artifacts reconstructed from a bundle.
struct ImportedBundle {
  TrajectoryDataset dataset;
  LoadedHierarchy segment_hierarchy;
  LoadedHierarchy trajectory_hierarchy;
};

namespace detail {

inline LoadedHierarchy hierarchy_from_json(const nlohmann::json& h) {
  std::vector<HierarchyRow> rows;
  for (const auto& n : h.at("nodes")) {
    HierarchyRow r;
    r.id = n.at("id").get<std::size_t>();
    r.parent = n.at("parent").is_null() ? -1 : n["parent"].get<std::int64_t>();
    r.level = n.at("level").get<int>();
    r.significant = n.at("significant").get<bool>();
    if (!n.at("modularity").is_null()) r.modularity = n["modularity"].get<double>();
    r.vertex_count = n.at("vertex_count").get<std::size_t>();
    rows.push_back(r);
  }
  std::vector<MembershipRow> members;
  for (const auto& m : h.at("membership")) {
    members.push_back(
        {m.at("id").get<std::uint64_t>(), m.at("leaf").get<std::size_t>(), m.at("level1").get<std::size_t>()});
  }
  auto out = assemble_hierarchy(rows, std::move(members));
  out.hierarchy.level_modularity = h.at("level_modularity").get<std::vector<double>>();
  return out;
}

}  // namespace detail

/// Validates, then rebuilds network, dataset and hierarchies.
inline ImportedBundle import_bundle(const nlohmann::json& doc) {
  const auto errors = validate_bundle(doc);
  if (!errors.empty()) {
    std::string msg = "invalid bundle:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InputError(msg);
  }
  std::vector<Node> nodes;
  for (const auto& n : doc["nodes"]) {
    nodes.push_back({NodeId{n["id"].get<std::uint64_t>()}, n.at("x").get<double>(), n.at("y").get<double>()});
  }
  std::vector<Segment> segments;
  for (const auto& s : doc["segments"]) {
    segments.push_back({SegmentId{s["id"].get<std::uint64_t>()}, NodeId{s["from"].get<std::uint64_t>()},
                        NodeId{s["to"].get<std::uint64_t>()}});
  }
  auto net = std::make_shared<RoadNetwork>(std::move(nodes), std::move(segments));
  std::vector<Trajectory> trajectories;
  for (const auto& t : doc["trajectories"]) {
    Trajectory tr{TrajectoryId{t["id"].get<std::uint64_t>()}, {}};
    for (const auto& s : t["segments"]) tr.segments.push_back(SegmentId{s.get<std::uint64_t>()});
    trajectories.push_back(std::move(tr));
  }
  return {TrajectoryDataset(net, std::move(trajectories)), detail::hierarchy_from_json(doc["segment_hierarchy"]),
          detail::hierarchy_from_json(doc["trajectory_hierarchy"])};
}

/// Recomputes the crossed matrix of an imported bundle at a level pair.
inline CrossedMatrix recompute_crossed_matrix(const ImportedBundle& b, int trajectory_level, int segment_level) {
  std::vector<TrajectoryId> trajs;
  for (auto id : b.trajectory_hierarchy.vertex_ids) trajs.push_back(TrajectoryId{id});
  std::vector<SegmentId> segs;
  for (auto id : b.segment_hierarchy.vertex_ids) segs.push_back(SegmentId{id});
  return crossed_matrix(b.dataset, trajs, b.trajectory_hierarchy.hierarchy.partition_at(trajectory_level), segs,
                        b.segment_hierarchy.hierarchy.partition_at(segment_level));
}

}  // namespace netseg
