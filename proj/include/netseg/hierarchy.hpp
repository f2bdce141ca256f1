#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netseg/community.hpp"
#include "netseg/detail/text.hpp"
#include "netseg/error.hpp"
#include "netseg/null_model.hpp"
#include "netseg/random.hpp"
#include "netseg/weighted_graph.hpp"

namespace netseg {

struct HierarchyNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;  ///< absent for level-1 clusters
  int level = 1;
  std::vector<std::uint32_t> vertices;  ///< graph vertex indices, ascending
  std::vector<std::size_t> children;
  std::optional<double> split_modularity;  ///< Q of the partition found inside this cluster
  bool significant = false;                ///< the split was kept (children exist)
  SignificanceResult test;                 ///< null-model diagnostics of the split
};

/// Tree of nested clusters. Level-1 clusters are the roots; node ids follow
/// creation order, level by level, like a running cluster counter.
struct ClusterHierarchy {
  std::size_t vertex_count = 0;
  std::vector<HierarchyNode> nodes;
  std::vector<std::size_t> roots;
  std::vector<double> level_modularity;  ///< Q of the level-l partition on the full graph (index l-1)

  int depth() const {
    int d = 0;
    for (const auto& n : nodes) d = std::max(d, n.level);
    return d;
  }

  /// Clusters making up level `level`: nodes of that level plus leaves of
  /// shallower levels, ordered by node id.
  std::vector<std::size_t> clusters_at(int level) const {
    if (level < 1 || level > depth()) throw InputError("unknown hierarchy level " + std::to_string(level));
    std::vector<std::size_t> out;
    for (const auto& n : nodes) {
      if (n.level == level || (n.level < level && n.children.empty())) out.push_back(n.id);
    }
    return out;
  }

  /// Flat partition at `level`; community k is clusters_at(level)[k].
  Partition partition_at(int level) const {
    const auto clusters = clusters_at(level);
    Partition p;
    p.K = clusters.size();
    p.membership.assign(vertex_count, 0);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      for (auto v : nodes[clusters[k]].vertices) p.membership[v] = static_cast<std::uint32_t>(k);
    }
    return p;
  }

  std::size_t leaf_of(std::uint32_t v) const {
    for (std::size_t r : roots) {
      if (!std::binary_search(nodes[r].vertices.begin(), nodes[r].vertices.end(), v)) continue;
      std::size_t at = r;
      while (!nodes[at].children.empty()) {
        for (std::size_t c : nodes[at].children) {
          if (std::binary_search(nodes[c].vertices.begin(), nodes[c].vertices.end(), v)) {
            at = c;
            break;
          }
        }
      }
      return at;
    }
    throw InputError("vertex " + std::to_string(v) + " is not in the hierarchy");
  }

  std::size_t root_of(std::size_t node) const {
    while (nodes[node].parent) node = *nodes[node].parent;
    return node;
  }
};

namespace detail {

inline std::vector<std::vector<std::uint32_t>> split_vertices(std::span<const std::uint32_t> parent_vertices,
                                                              const Partition& local) {
  std::vector<std::vector<std::uint32_t>> out(local.K);
  for (std::size_t k = 0; k < parent_vertices.size(); ++k) out[local.membership[k]].push_back(parent_vertices[k]);
  return out;
}

}  // namespace detail

/// Hierarchical modularity clustering.
///
/// Level 1 is greedy_partition of the whole graph. At each further level,
/// every cluster created at the previous level is cut out as an induced
/// subgraph and partitioned; the split is kept only if test_significance
/// accepts it. Stops when a level adds no cluster. The null-model seed of
/// node `id` is derive_seed(cfg.seed, id).
inline ClusterHierarchy hierarchical_cluster(const WeightedGraph& g, const NullModelConfig& cfg) {
  cfg.validate();
  if (g.vertex_count() == 0) throw InputError("cannot cluster an empty graph");
  ClusterHierarchy h;
  h.vertex_count = g.vertex_count();

  std::vector<std::uint32_t> all(g.vertex_count());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<std::uint32_t>(v);
  const Partition top = greedy_partition(g);
  h.level_modularity.push_back(modularity(g, top));
  for (auto& members : detail::split_vertices(all, top)) {
    HierarchyNode node;
    node.id = h.nodes.size();
    node.level = 1;
    node.vertices = std::move(members);
    h.roots.push_back(node.id);
    h.nodes.push_back(std::move(node));
  }

  std::vector<std::size_t> frontier = h.roots;
  for (int level = 2; !frontier.empty(); ++level) {
    std::vector<std::size_t> next;
    for (std::size_t id : frontier) {
      const auto vertices = h.nodes[id].vertices;
      if (vertices.size() < std::max<std::size_t>(2, cfg.min_subgraph_size)) continue;
      const WeightedGraph sub = g.induced_subgraph(vertices);
      if (sub.edge_count() == 0) continue;
      const Partition local = greedy_partition(sub);
      NullModelConfig node_cfg = cfg;
      node_cfg.seed = derive_seed(cfg.seed, id);
      const SignificanceResult test = test_significance(sub, local, node_cfg);
      h.nodes[id].split_modularity = test.observed;
      h.nodes[id].test = test;
      if (!test.significant) continue;
      h.nodes[id].significant = true;
      for (auto& members : detail::split_vertices(vertices, local)) {
        HierarchyNode child;
        child.id = h.nodes.size();
        child.parent = id;
        child.level = level;
        child.vertices = std::move(members);
        h.nodes[id].children.push_back(child.id);
        next.push_back(child.id);
        h.nodes.push_back(std::move(child));
      }
    }
    if (!next.empty()) h.level_modularity.push_back(modularity(g, h.partition_at(level)));
    frontier = std::move(next);
  }
  return h;
}

/// Writes the hierarchy (`node_id,parent_id,level,significant,modularity,vertex_count`,
/// parent -1 for level-1 clusters, modularity empty when no split was tried)
/// and the membership file (`vertex_id,leaf_node_id,level1_node_id`).
template <class Id>
void write_hierarchy(std::ostream& nodes_out, std::ostream& membership_out, const ClusterHierarchy& h,
                     std::span<const Id> vertex_ids) {
  nodes_out << "node_id,parent_id,level,significant,modularity,vertex_count\n";
  for (const auto& n : h.nodes) {
    nodes_out << n.id << ',' << (n.parent ? std::to_string(*n.parent) : std::string("-1")) << ',' << n.level << ','
              << (n.significant ? 1 : 0) << ',' << (n.split_modularity ? detail::format_real(*n.split_modularity) : "")
              << ',' << n.vertices.size() << '\n';
  }
  membership_out << "vertex_id,leaf_node_id,level1_node_id\n";
  std::vector<std::size_t> leaf(h.vertex_count, 0);
  for (const auto& n : h.nodes) {
    if (n.children.empty()) {
      for (auto v : n.vertices) leaf[v] = n.id;
    }
  }
  for (std::size_t v = 0; v < h.vertex_count; ++v) {
    membership_out << vertex_ids[v].value << ',' << leaf[v] << ',' << h.root_of(leaf[v]) << '\n';
  }
}

/// Per-split diagnostics: `node_id,replicates,observed,null_mean,null_stddev,z,significant`.
inline void write_hierarchy_diagnostics(std::ostream& os, const ClusterHierarchy& h) {
  os << "node_id,replicates,observed,null_mean,null_stddev,z,significant\n";
  for (const auto& n : h.nodes) {
    if (!n.split_modularity) continue;
    os << n.id << ',' << n.test.replicates << ',' << detail::format_real(n.test.observed) << ','
       << detail::format_real(n.test.null_mean) << ',' << detail::format_real(n.test.null_stddev) << ','
       << detail::format_real(n.test.z) << ',' << (n.significant ? 1 : 0) << '\n';
  }
}

/// A hierarchy read back from its exported files. Vertex k of the hierarchy
/// is vertex_ids[k] (ascending).
struct LoadedHierarchy {
  std::vector<std::uint64_t> vertex_ids;
  ClusterHierarchy hierarchy;

  std::size_t vertex_index(std::uint64_t id) const {
    auto it = std::lower_bound(vertex_ids.begin(), vertex_ids.end(), id);
    if (it == vertex_ids.end() || *it != id) throw InputError("id " + std::to_string(id) + " not in hierarchy");
    return static_cast<std::size_t>(it - vertex_ids.begin());
  }
};

/// One row of an exported hierarchy table.
struct HierarchyRow {
  std::size_t id = 0;
  std::int64_t parent = -1;
  int level = 1;
  bool significant = false;
  std::optional<double> modularity;
  std::size_t vertex_count = 0;
};

/// One row of an exported membership table.
struct MembershipRow {
  std::uint64_t vertex = 0;
  std::size_t leaf = 0;
  std::size_t level1 = 0;
};

/// Rebuilds a hierarchy from exported rows and checks that they are
/// consistent: ids run 0..N-1, parents exist and sit one level up, members
/// point at leaves whose level-1 ancestor matches, no vertex appears twice,
/// and declared sizes match the memberships.
inline LoadedHierarchy assemble_hierarchy(const std::vector<HierarchyRow>& rows, std::vector<MembershipRow> members) {
  LoadedHierarchy out;
  auto& h = out.hierarchy;
  auto node_name = [](std::size_t id) { return "hierarchy node " + std::to_string(id); };
  h.nodes.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].id != k) throw InputError("hierarchy node ids must run 0.." + std::to_string(rows.size() - 1));
  }
  for (const auto& r : rows) {
    auto& n = h.nodes[r.id];
    n.id = r.id;
    n.level = r.level;
    n.significant = r.significant;
    n.split_modularity = r.modularity;
    if (r.parent < 0) {
      if (r.level != 1) throw InputError(node_name(r.id) + " has no parent but level " + std::to_string(r.level));
      h.roots.push_back(r.id);
      continue;
    }
    const auto p = static_cast<std::size_t>(r.parent);
    if (p >= rows.size()) throw InputError(node_name(r.id) + " references unknown parent " + std::to_string(p));
    if (rows[p].level + 1 != r.level) throw InputError(node_name(r.id) + " is not one level below its parent");
    n.parent = p;
    h.nodes[p].children.push_back(r.id);
  }

  std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.vertex < b.vertex; });
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& m = members[k];
    if (k > 0 && members[k - 1].vertex == m.vertex) {
      throw InputError("vertex " + std::to_string(m.vertex) + " listed twice in membership");
    }
    if (m.leaf >= h.nodes.size()) throw InputError("membership references unknown " + node_name(m.leaf));
    if (m.level1 >= h.nodes.size()) throw InputError("membership references unknown " + node_name(m.level1));
    if (!h.nodes[m.leaf].children.empty()) throw InputError(node_name(m.leaf) + " is not a leaf");
    if (h.root_of(m.leaf) != m.level1) {
      throw InputError("vertex " + std::to_string(m.vertex) + ": level-1 node does not match leaf ancestry");
    }
  }
  h.vertex_count = members.size();
  for (std::size_t k = 0; k < members.size(); ++k) {
    out.vertex_ids.push_back(members[k].vertex);
    for (std::optional<std::size_t> at = members[k].leaf; at; at = h.nodes[*at].parent) {
      h.nodes[*at].vertices.push_back(static_cast<std::uint32_t>(k));
    }
  }
  for (const auto& r : rows) {
    if (h.nodes[r.id].vertices.size() != r.vertex_count) {
      throw InputError(node_name(r.id) + " declares " + std::to_string(r.vertex_count) +
                       " vertices but membership gives " + std::to_string(h.nodes[r.id].vertices.size()));
    }
  }
  return out;
}

/// Parses the two files written by write_hierarchy; see assemble_hierarchy
/// for the consistency checks.
inline LoadedHierarchy read_hierarchy(std::istream& nodes_in, std::istream& membership_in) {
  using namespace detail;
  std::vector<HierarchyRow> rows;
  {
    LineReader reader(nodes_in);
    expect_header(reader, "node_id,parent_id,level,significant,modularity,vertex_count");
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, ',');
      if (f.size() != 6) throw ParseError(reader.line(), "expected 6 fields in hierarchy row");
      HierarchyRow r;
      r.id = parse_u64(f[0], reader.line(), "node id");
      auto parent = to_i64(f[1]);
      if (!parent || *parent < -1) throw ParseError(reader.line(), "invalid parent id");
      r.parent = *parent;
      r.level = static_cast<int>(parse_u64(f[2], reader.line(), "level"));
      r.significant = parse_u64(f[3], reader.line(), "significant flag") != 0;
      if (!f[4].empty()) r.modularity = parse_f64(f[4], reader.line(), "modularity");
      r.vertex_count = parse_u64(f[5], reader.line(), "vertex count");
      rows.push_back(r);
    }
  }
  std::vector<MembershipRow> members;
  {
    LineReader reader(membership_in);
    expect_header(reader, "vertex_id,leaf_node_id,level1_node_id");
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, ',');
      if (f.size() != 3) throw ParseError(reader.line(), "expected 3 fields in membership row");
      members.push_back({parse_u64(f[0], reader.line(), "vertex id"), parse_u64(f[1], reader.line(), "leaf node id"),
                         parse_u64(f[2], reader.line(), "level-1 node id")});
    }
  }
  return assemble_hierarchy(rows, std::move(members));
}

}  // namespace netseg
