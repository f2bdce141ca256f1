// netseg: command-line pipeline over road networks and trajectory datasets.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netseg/baselines.hpp"
#include "netseg/bundle.hpp"
#include "netseg/evaluation.hpp"
#include "netseg/experiment.hpp"
#include "netseg/generator.hpp"
#include "netseg/hierarchy.hpp"
#include "netseg/log.hpp"
#include "netseg/manifest.hpp"
#include "netseg/partition_io.hpp"
#include "netseg/scenarios.hpp"
#include "netseg/similarity.hpp"

namespace fs = std::filesystem;
using namespace netseg;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sub-seed offsets; recorded in every manifest.
constexpr std::uint64_t kSeedNullModel = 1;
constexpr std::uint64_t kSeedSpectral = 2;
constexpr std::uint64_t kSeedLabelProp = 3;

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
};

struct DataPaths {
  std::string dir;
  std::string nodes;
  std::string segments;
  std::string trajectories;

  void resolve() {
    if (!dir.empty()) {
      if (nodes.empty()) nodes = (fs::path(dir) / "nodes.csv").string();
      if (segments.empty()) segments = (fs::path(dir) / "segments.csv").string();
      if (trajectories.empty()) trajectories = (fs::path(dir) / "trajectories.csv").string();
    }
    if (nodes.empty() || segments.empty() || trajectories.empty()) {
      throw UsageError("dataset needs --data DIR or all of --nodes, --segments, --trajectories");
    }
  }
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--seed", c.seed, "master random seed")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_out) app->add_option("--out", c.out, "output directory")->required();
}

void add_data(CLI::App* app, DataPaths& d) {
  app->add_option("--data", d.dir, "directory holding nodes.csv, segments.csv, trajectories.csv");
  app->add_option("--nodes", d.nodes, "nodes CSV (node_id,x,y)");
  app->add_option("--segments", d.segments, "segments CSV (segment_id,from_node,to_node)");
  app->add_option("--trajectories", d.trajectories, "trajectory file (id;seg,seg,...)");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  return in;
}

std::shared_ptr<RoadNetwork> load_network_files(const std::string& nodes, const std::string& segments) {
  auto n = open_in(nodes);
  auto s = open_in(segments);
  return std::make_shared<RoadNetwork>(load_network(n, s));
}

TrajectoryDataset load_dataset(DataPaths& d, RunManifest& m) {
  d.resolve();
  auto net = load_network_files(d.nodes, d.segments);
  auto t = open_in(d.trajectories);
  auto ds = load_trajectories(net, t);
  m.add_input(d.nodes);
  m.add_input(d.segments);
  m.add_input(d.trajectories);
  log::info("loaded ", net->node_count(), " nodes, ", net->segment_count(), " segments, ", ds.size(),
            " trajectories");
  return ds;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

template <class Fn>
fs::path write_file(const fs::path& path, RunManifest& m, Fn&& body) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    body(out);
  }
  m.add_output(path);
  return path;
}

void finish(const fs::path& out, const RunManifest& m) { m.write(out / "manifest.json"); }

void record_common(RunManifest& m, const Common& c) {
  m.parameters["seed"] = c.seed;
  m.parameters["threads"] = c.threads;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  Common common;
  std::string nodes, segments;
  std::size_t grid_rows = 0, grid_cols = 0;
  std::size_t regions = 0, region_side = 5;
  bool linked = false;
  bool confine = false;
  bool hub = false;
  std::size_t per_cluster = 20;
  GeneratorConfig gen;
};

void register_generator_flags(CLI::App* app, GeneratorConfig& g) {
  app->add_option("--n", g.n_trajectories, "number of trajectories")->capture_default_str();
  app->add_option("--archetypes", g.n_archetypes, "origin/destination archetypes")->capture_default_str();
  app->add_option("--detour", g.detour_probability, "per-node detour probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--jitter", g.od_jitter, "max hops of origin/destination drift")->capture_default_str();
  app->add_option("--max-od-attempts", g.max_od_attempts, "OD re-sampling budget per archetype")
      ->capture_default_str();
}

int run_generate(GenerateArgs& a) {
  RunManifest m;
  m.command = "generate";
  record_common(m, a.common);
  const int sources = (a.grid_rows > 0 ? 1 : 0) + (a.regions > 0 ? 1 : 0) + (a.hub ? 1 : 0) + (!a.nodes.empty() ? 1 : 0);
  if (sources != 1) throw UsageError("choose exactly one of --grid-rows/--grid-cols, --regions, --hub, --nodes/--segments");
  a.gen.seed = a.common.seed;
  m.seeds["generator"] = a.gen.seed;

  GeneratedDataset gen;
  if (a.hub) {
    HubScenarioConfig hc;
    hc.trajectories_per_cluster = a.per_cluster;
    hc.seed = a.common.seed;
    m.parameters["scenario"] = "hub";
    m.parameters["per_cluster"] = a.per_cluster;
    gen = make_hub_scenario(hc);
  } else {
    std::shared_ptr<RoadNetwork> net;
    if (a.grid_rows > 0) {
      if (a.grid_cols == 0) a.grid_cols = a.grid_rows;
      net = make_grid_network(a.grid_rows, a.grid_cols);
      m.parameters["grid_rows"] = a.grid_rows;
      m.parameters["grid_cols"] = a.grid_cols;
    } else if (a.regions > 0) {
      auto rn = make_region_network(a.regions, a.region_side, a.linked);
      net = rn.network;
      if (a.confine) a.gen.regions = rn.regions;
      m.parameters["regions"] = a.regions;
      m.parameters["region_side"] = a.region_side;
      m.parameters["linked"] = a.linked;
      m.parameters["confine"] = a.confine;
    } else {
      if (a.segments.empty()) throw UsageError("--nodes needs --segments");
      net = load_network_files(a.nodes, a.segments);
      m.add_input(a.nodes);
      m.add_input(a.segments);
    }
    m.parameters["n"] = a.gen.n_trajectories;
    m.parameters["archetypes"] = a.gen.n_archetypes;
    m.parameters["detour"] = a.gen.detour_probability;
    m.parameters["jitter"] = a.gen.od_jitter;
    m.parameters["max_od_attempts"] = a.gen.max_od_attempts;
    gen = generate_dataset(net, a.gen);
  }

  const auto out = prepare_out(a.common.out);
  const auto& net = gen.dataset.network();
  {
    std::ofstream n(out / "nodes.csv", std::ios::binary), s(out / "segments.csv", std::ios::binary);
    if (!n || !s) throw InputError("cannot write network files to " + out.string());
    write_network(n, s, net);
  }
  m.add_output(out / "nodes.csv");
  m.add_output(out / "segments.csv");
  write_file(out / "trajectories.csv", m, [&](std::ostream& os) { write_trajectories(os, gen.dataset); });
  write_file(out / "ground_truth.csv", m, [&](std::ostream& os) { write_ground_truth(os, gen); });
  finish(out, m);
  const auto st = dataset_stats(gen.dataset);
  std::cout << "trajectories=" << st.trajectories << " distinct_segments=" << st.distinct_segments << '\n';
  return 0;
}

// --- simgraph ---------------------------------------------------------------

struct GraphArgs {
  Common common;
  DataPaths data;
  std::string graph = "segments";
};

int run_simgraph(GraphArgs& a) {
  RunManifest m;
  m.command = "simgraph";
  record_common(m, a.common);
  m.parameters["graph"] = a.graph;
  const auto ds = load_dataset(a.data, m);
  const auto out = prepare_out(a.common.out);
  auto emit = [&](const auto& g) {
    write_file(out / "vertices.csv", m, [&](std::ostream& os) { write_graph_vertices(os, g); });
    write_file(out / "edges.csv", m, [&](std::ostream& os) { write_graph_edges(os, g); });
    std::cout << "vertices=" << g.graph.vertex_count() << " edges=" << g.graph.edge_count() << '\n';
  };
  if (a.graph == "segments") {
    emit(build_segment_similarity_graph(ds, a.common.threads));
  } else {
    emit(build_trajectory_similarity_graph(ds, a.common.threads));
  }
  finish(out, m);
  return 0;
}

// --- cluster ----------------------------------------------------------------

struct ClusterArgs {
  Common common;
  DataPaths data;
  std::string graph = "segments";
  std::string vertices_file;
  std::string edges_file;
  std::string method = "modularity";
  std::optional<std::size_t> k;
  std::string match_k;
  std::optional<int> level;
  NullModelConfig null_model;
  std::size_t max_rounds = 100;
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
};

void register_null_model_flags(CLI::App* app, NullModelConfig& nm) {
  app->add_option("--replicates", nm.replicates, "null-model replicates per significance test")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  app->add_option("--z", nm.z_threshold, "significance threshold in null standard deviations")->capture_default_str();
  app->add_option("--min-size", nm.min_subgraph_size, "smallest cluster that is tested for a split")
      ->capture_default_str();
}

void record_null_model(RunManifest& m, const NullModelConfig& nm) {
  m.parameters["replicates"] = nm.replicates;
  m.parameters["z"] = nm.z_threshold;
  m.parameters["min_size"] = nm.min_subgraph_size;
}

std::size_t reference_k(const std::string& path, RunManifest& m) {
  auto in = open_in(path);
  const auto ref = read_partition(in);
  m.add_input(path);
  return ref.partition.K;
}

template <class Id>
int cluster_graph(ClusterArgs& a, RunManifest& m, const TrajectoryDataset* ds, const SimilarityGraph<Id>& g) {
  if (g.graph.vertex_count() == 0) throw InputError("similarity graph has no vertices");
  const auto out = prepare_out(a.common.out);
  const std::span<const Id> ids(g.vertices);
  std::optional<std::size_t> target = a.k;
  if (!a.match_k.empty()) target = reference_k(a.match_k, m);
  if (target) m.parameters["target_k"] = *target;

  Partition p;
  if (a.method == "modularity") {
    NullModelConfig nm = a.null_model;
    nm.seed = derive_seed(a.common.seed, kSeedNullModel);
    nm.threads = a.common.threads;
    m.seeds["null_model"] = nm.seed;
    const auto h = hierarchical_cluster(g.graph, nm);
    int level = a.level.value_or(1);
    if (!a.level && target) level = closest_level(h, *target);
    if (level < 1 || level > h.depth()) {
      throw UsageError("--level " + std::to_string(level) + " outside 1.." + std::to_string(h.depth()));
    }
    m.parameters["level"] = level;
    {
      std::ofstream nodes(out / "hierarchy_nodes.csv", std::ios::binary);
      std::ofstream members(out / "hierarchy_membership.csv", std::ios::binary);
      if (!nodes || !members) throw InputError("cannot write hierarchy files to " + out.string());
      write_hierarchy(nodes, members, h, ids);
    }
    m.add_output(out / "hierarchy_nodes.csv");
    m.add_output(out / "hierarchy_membership.csv");
    write_file(out / "hierarchy_diagnostics.csv", m, [&](std::ostream& os) { write_hierarchy_diagnostics(os, h); });
    p = h.partition_at(level);
    std::cout << "depth=" << h.depth();
    for (int l = 1; l <= h.depth(); ++l) std::cout << " K" << l << '=' << h.clusters_at(l).size();
    std::cout << " level=" << level << '\n';
  } else if (a.method == "spectral") {
    if (!target) throw UsageError("spectral clustering needs --k or --match-k");
    ExperimentConfig ec;
    ec.kmeans_restarts = a.restarts;
    ec.kmeans_max_iters = a.max_iters;
    const auto seed = derive_seed(a.common.seed, kSeedSpectral);
    m.seeds["spectral"] = seed;
    m.parameters["restarts"] = a.restarts;
    m.parameters["max_iters"] = a.max_iters;
    if (*target < 1 || *target > g.graph.vertex_count()) {
      throw UsageError("k=" + std::to_string(*target) + " must lie in 1.." + std::to_string(g.graph.vertex_count()));
    }
    p = spectral_total_k(g.graph, *target, ec, seed);
  } else {
    if (target) throw UsageError("label propagation does not take a cluster count");
    const auto seed = derive_seed(a.common.seed, kSeedLabelProp);
    m.seeds["labelprop"] = seed;
    m.parameters["max_rounds"] = a.max_rounds;
    p = label_propagation(g.graph, {a.max_rounds, seed});
  }

  write_file(out / "partition.csv", m, [&](std::ostream& os) { write_partition(os, ids, p); });
  std::cout << "K=" << p.K << " modularity=" << detail::format_real(modularity(g.graph, p));
  if constexpr (std::is_same_v<Id, SegmentId>) {
    if (ds) std::cout << " quality=" << detail::format_real(partition_quality(*ds, ids, p).total);
  }
  std::cout << '\n';
  finish(out, m);
  return 0;
}

int run_cluster(ClusterArgs& a) {
  RunManifest m;
  m.command = "cluster";
  record_common(m, a.common);
  m.parameters["graph"] = a.graph;
  m.parameters["method"] = a.method;
  if (a.method == "modularity") record_null_model(m, a.null_model);
  if (a.k && !a.match_k.empty()) throw UsageError("--k and --match-k are exclusive");
  if (a.level && a.method != "modularity") throw UsageError("--level applies to modularity clustering only");
  if (a.method == "spectral" && !a.k && a.match_k.empty()) throw UsageError("spectral clustering needs --k or --match-k");
  if (a.vertices_file.empty() != a.edges_file.empty()) throw UsageError("--vertices and --edges go together");
  if (!a.vertices_file.empty()) {
    if (!a.data.dir.empty() || !a.data.trajectories.empty()) throw UsageError("give either a dataset or a graph");
    auto vin = open_in(a.vertices_file);
    auto ein = open_in(a.edges_file);
    m.add_input(a.vertices_file);
    m.add_input(a.edges_file);
    if (a.graph == "segments") return cluster_graph(a, m, nullptr, read_similarity_graph<SegmentId>(vin, ein));
    return cluster_graph(a, m, nullptr, read_similarity_graph<TrajectoryId>(vin, ein));
  }
  const auto ds = load_dataset(a.data, m);
  if (a.graph == "segments") return cluster_graph(a, m, &ds, build_segment_similarity_graph(ds, a.common.threads));
  return cluster_graph(a, m, &ds, build_trajectory_similarity_graph(ds, a.common.threads));
}

// --- evaluate / crossmatrix -------------------------------------------------

struct EvaluateArgs {
  Common common;
  DataPaths data;
  std::string partition;
};

template <class Id>
std::vector<Id> typed_ids(const std::vector<std::uint64_t>& raw) {
  std::vector<Id> out;
  out.reserve(raw.size());
  for (auto v : raw) out.push_back(Id{v});
  return out;
}

int run_evaluate(EvaluateArgs& a) {
  RunManifest m;
  m.command = "evaluate";
  record_common(m, a.common);
  const auto ds = load_dataset(a.data, m);
  auto in = open_in(a.partition);
  const auto lp = read_partition(in);
  m.add_input(a.partition);
  const auto segs = typed_ids<SegmentId>(lp.ids);
  const auto rep = partition_quality(ds, segs, lp.partition);
  const auto out = prepare_out(a.common.out);
  write_file(out / "quality.csv", m, [&](std::ostream& os) { write_quality_report(os, rep); });
  finish(out, m);
  std::cout << "K=" << rep.K << " quality=" << detail::format_real(rep.total) << '\n';
  return 0;
}

struct CrossArgs {
  Common common;
  DataPaths data;
  std::string trajectory_partition;
  std::string segment_partition;
};

int run_crossmatrix(CrossArgs& a) {
  RunManifest m;
  m.command = "crossmatrix";
  record_common(m, a.common);
  const auto ds = load_dataset(a.data, m);
  auto tin = open_in(a.trajectory_partition);
  auto sin = open_in(a.segment_partition);
  const auto tp = read_partition(tin);
  const auto sp = read_partition(sin);
  m.add_input(a.trajectory_partition);
  m.add_input(a.segment_partition);
  const auto trajs = typed_ids<TrajectoryId>(tp.ids);
  for (auto t : trajs) {
    if (!ds.has_trajectory(t)) throw InputError("trajectory " + std::to_string(t.value) + " is not in the dataset");
  }
  const auto segs = typed_ids<SegmentId>(sp.ids);
  for (auto s : segs) {
    if (!ds.network().has_segment(s)) throw InputError("segment " + std::to_string(s.value) + " is not in the network");
  }
  const auto cm = crossed_matrix(ds, trajs, tp.partition, segs, sp.partition);
  const auto out = prepare_out(a.common.out);
  write_file(out / "crossed.csv", m, [&](std::ostream& os) { write_crossed_matrix(os, cm); });
  finish(out, m);
  std::cout << "rows=" << cm.rows << " cols=" << cm.cols << '\n';
  return 0;
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
  Common common;
  std::vector<std::string> datasets;
  std::size_t generate = 0;
  std::size_t grid = 20;
  GeneratorConfig gen;
  ExperimentConfig cfg;
};

int run_experiment_cmd(ExperimentArgs& a) {
  RunManifest m;
  m.command = "experiment";
  record_common(m, a.common);
  record_null_model(m, a.cfg.null_model);
  m.parameters["labelprop_max_rounds"] = a.cfg.labelprop_max_rounds;
  m.parameters["kmeans_restarts"] = a.cfg.kmeans_restarts;
  m.parameters["kmeans_max_iters"] = a.cfg.kmeans_max_iters;
  if (a.datasets.empty() == (a.generate == 0)) throw UsageError("give either --datasets or --generate");

  std::vector<std::pair<std::string, TrajectoryDataset>> inputs;
  if (a.generate > 0) {
    m.parameters["generate"] = a.generate;
    m.parameters["grid"] = a.grid;
    m.parameters["n"] = a.gen.n_trajectories;
    m.parameters["archetypes"] = a.gen.n_archetypes;
    m.parameters["detour"] = a.gen.detour_probability;
    m.parameters["jitter"] = a.gen.od_jitter;
    auto net = make_grid_network(a.grid, a.grid);
    for (std::size_t d = 0; d < a.generate; ++d) {
      GeneratorConfig g = a.gen;
      g.seed = a.common.seed + d;
      m.seeds["dataset_" + std::to_string(d + 1)] = g.seed;
      inputs.emplace_back("d" + std::to_string(d + 1), generate_dataset(net, g).dataset);
    }
  } else {
    for (const auto& dir : a.datasets) {
      DataPaths p;
      p.dir = dir;
      inputs.emplace_back(fs::path(dir).filename().string(), load_dataset(p, m));
    }
  }
  a.cfg.seed = a.common.seed;
  a.cfg.threads = a.common.threads;
  m.seeds["null_model"] = derive_seed(a.cfg.seed, 1);
  m.seeds["spectral"] = derive_seed(a.cfg.seed, 2);
  m.seeds["labelprop"] = derive_seed(a.cfg.seed, 3);
  m.seeds["spectral_matched"] = derive_seed(a.cfg.seed, 4);

  std::vector<ExperimentRow> rows;
  for (const auto& [name, ds] : inputs) {
    rows.push_back(run_experiment(name, ds, a.cfg));
    log::info(name, " done in ", rows.back().seconds, " s");
  }
  const auto out = prepare_out(a.common.out);
  write_file(out / "experiment.csv", m, [&](std::ostream& os) { write_experiment_table(os, rows); });
  finish(out, m);
  write_experiment_table(std::cout, rows);
  return 0;
}

// --- bundles ----------------------------------------------------------------

struct BundleArgs {
  Common common;
  DataPaths data;
  std::string segment_hierarchy;
  std::string trajectory_hierarchy;
  NullModelConfig null_model;
};

template <class Id>
ClusterHierarchy obtain_hierarchy(const std::string& dir, const SimilarityGraph<Id>& g, const NullModelConfig& nm,
                                  RunManifest& m) {
  if (dir.empty()) return hierarchical_cluster(g.graph, nm);
  const auto nodes_path = (fs::path(dir) / "hierarchy_nodes.csv").string();
  const auto members_path = (fs::path(dir) / "hierarchy_membership.csv").string();
  auto nodes = open_in(nodes_path);
  auto members = open_in(members_path);
  auto loaded = read_hierarchy(nodes, members);
  m.add_input(nodes_path);
  m.add_input(members_path);
  std::vector<std::uint64_t> expected;
  for (auto id : g.vertices) expected.push_back(id.value);
  if (loaded.vertex_ids != expected) {
    throw InputError("hierarchy in " + dir + " does not cover exactly the vertices of the similarity graph");
  }
  return std::move(loaded.hierarchy);
}

int run_export_bundle(BundleArgs& a) {
  RunManifest m;
  m.command = "export-bundle";
  record_common(m, a.common);
  const auto ds = load_dataset(a.data, m);
  const auto sg = build_segment_similarity_graph(ds, a.common.threads);
  const auto tg = build_trajectory_similarity_graph(ds, a.common.threads);
  if (sg.graph.vertex_count() == 0 || tg.graph.vertex_count() == 0) throw InputError("dataset has no trajectories");
  NullModelConfig nm = a.null_model;
  nm.threads = a.common.threads;
  if (a.segment_hierarchy.empty() || a.trajectory_hierarchy.empty()) record_null_model(m, nm);
  nm.seed = derive_seed(a.common.seed, kSeedNullModel);
  if (a.segment_hierarchy.empty()) m.seeds["segment_null_model"] = nm.seed;
  const auto sh = obtain_hierarchy(a.segment_hierarchy, sg, nm, m);
  nm.seed = derive_seed(a.common.seed, kSeedNullModel + 100);
  if (a.trajectory_hierarchy.empty()) m.seeds["trajectory_null_model"] = nm.seed;
  const auto th = obtain_hierarchy(a.trajectory_hierarchy, tg, nm, m);

  const auto doc = build_bundle({ds, sg, sh, tg, th});
  if (auto errors = validate_bundle(doc); !errors.empty()) {
    for (const auto& e : errors) log::error(e);
    throw Error("exported bundle failed its own validation");
  }
  const auto out = prepare_out(a.common.out);
  write_file(out / "bundle.json", m, [&](std::ostream& os) { os << doc.dump() << '\n'; });
  finish(out, m);
  std::cout << "segment_depth=" << sh.depth() << " trajectory_depth=" << th.depth() << '\n';
  return 0;
}

int run_validate_bundle(const std::string& path) {
  auto in = open_in(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("bundle does not parse: ") + e.what());
  }
  const auto errors = validate_bundle(doc);
  for (const auto& e : errors) std::cout << e << '\n';
  if (!errors.empty()) return kExitUsage;
  std::cout << "bundle ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netseg: similarity-graph clustering of road segments and trajectories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "generate a synthetic trajectory dataset");
  add_common(g, gen.common);
  g->add_option("--nodes", gen.nodes, "network nodes CSV");
  g->add_option("--segments", gen.segments, "network segments CSV");
  g->add_option("--grid-rows", gen.grid_rows, "synthetic grid rows");
  g->add_option("--grid-cols", gen.grid_cols, "synthetic grid columns (default: rows)");
  g->add_option("--regions", gen.regions, "synthetic network of square grid regions");
  g->add_option("--region-side", gen.region_side, "side of each region")->capture_default_str();
  g->add_flag("--linked", gen.linked, "join consecutive regions by one two-way link");
  g->add_flag("--confine", gen.confine, "draw each archetype's endpoints inside one region");
  g->add_flag("--hub", gen.hub, "hand-built hub scenario (five corridor groups, two share a hub)");
  g->add_option("--per-cluster", gen.per_cluster, "trajectories per group in the hub scenario")->capture_default_str();
  register_generator_flags(g, gen.gen);

  GraphArgs sim;
  auto* s = app.add_subcommand("simgraph", "build a similarity graph");
  add_common(s, sim.common);
  add_data(s, sim.data);
  s->add_option("--graph", sim.graph, "segments or trajectories")
      ->check(CLI::IsMember({"segments", "trajectories"}))
      ->capture_default_str();

  ClusterArgs cl;
  auto* c = app.add_subcommand("cluster", "cluster a similarity graph");
  add_common(c, cl.common);
  add_data(c, cl.data);
  c->add_option("--graph", cl.graph, "segments or trajectories")
      ->check(CLI::IsMember({"segments", "trajectories"}))
      ->capture_default_str();
  c->add_option("--vertices", cl.vertices_file, "precomputed graph: vertex list from simgraph");
  c->add_option("--edges", cl.edges_file, "precomputed graph: edge list from simgraph");
  c->add_option("--method", cl.method, "modularity, labelprop or spectral")
      ->check(CLI::IsMember({"modularity", "labelprop", "spectral"}))
      ->capture_default_str();
  c->add_option("--k", cl.k, "target cluster count");
  c->add_option("--match-k", cl.match_k, "partition CSV whose cluster count is the target");
  c->add_option("--level", cl.level, "hierarchy level written to partition.csv");
  c->add_option("--max-rounds", cl.max_rounds, "label propagation round limit")->capture_default_str();
  c->add_option("--restarts", cl.restarts, "k-means restarts")->capture_default_str();
  c->add_option("--max-iters", cl.max_iters, "k-means iteration limit")->capture_default_str();
  register_null_model_flags(c, cl.null_model);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "quality of a segment partition");
  add_common(e, ev.common);
  add_data(e, ev.data);
  e->add_option("--partition", ev.partition, "segment partition CSV (vertex_id,community)")->required();

  CrossArgs cr;
  auto* x = app.add_subcommand("crossmatrix", "trajectory-cluster x segment-cluster densities");
  add_common(x, cr.common);
  add_data(x, cr.data);
  x->add_option("--trajectory-partition", cr.trajectory_partition, "trajectory partition CSV")->required();
  x->add_option("--segment-partition", cr.segment_partition, "segment partition CSV")->required();

  ExperimentArgs ex;
  auto* xp = app.add_subcommand("experiment", "matched-K comparison of the three methods");
  add_common(xp, ex.common);
  xp->add_option("--datasets", ex.datasets, "dataset directories");
  xp->add_option("--generate", ex.generate, "generate this many datasets on a grid instead");
  xp->add_option("--grid", ex.grid, "grid side for generated datasets")->capture_default_str();
  ex.gen.n_archetypes = 100;
  ex.gen.od_jitter = 0;
  register_generator_flags(xp, ex.gen);
  register_null_model_flags(xp, ex.cfg.null_model);
  xp->add_option("--max-rounds", ex.cfg.labelprop_max_rounds, "label propagation round limit")->capture_default_str();
  xp->add_option("--restarts", ex.cfg.kmeans_restarts, "k-means restarts")->capture_default_str();

  BundleArgs bu;
  auto* b = app.add_subcommand("export-bundle", "write the explorer bundle");
  add_common(b, bu.common);
  add_data(b, bu.data);
  b->add_option("--segment-hierarchy", bu.segment_hierarchy, "directory from cluster --graph segments (default: recompute)");
  b->add_option("--trajectory-hierarchy", bu.trajectory_hierarchy,
                "directory from cluster --graph trajectories (default: recompute)");
  register_null_model_flags(b, bu.null_model);

  std::string bundle_path;
  auto* vb = app.add_subcommand("validate-bundle", "check a bundle's schema and referential integrity");
  vb->add_option("bundle", bundle_path, "bundle JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_simgraph(sim);
    if (*c) return run_cluster(cl);
    if (*e) return run_evaluate(ev);
    if (*x) return run_crossmatrix(cr);
    if (*xp) return run_experiment_cmd(ex);
    if (*b) return run_export_bundle(bu);
    if (*vb) return run_validate_bundle(bundle_path);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const InputError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
