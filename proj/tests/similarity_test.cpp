#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "netseg/generator.hpp"
#include "netseg/similarity.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace netseg {
namespace {

using testing::dataset_from_text;

TEST(SegmentWeight, ZeroWhenNotVisited) {
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1,2\n2;5,6\n");
  EXPECT_EQ(segment_weight(ds, TrajectoryId{1}, SegmentId{5}), 0.0);
  EXPECT_EQ(segment_weight(ds, TrajectoryId{1}, SegmentId{9}), 0.0);
}

TEST(SegmentWeight, HalfShareTimesLogOfRelativeLength) {
  // |S| = 100; segment 3 visited once by T1 (4 distinct segments) and once by T2.
  auto ds = dataset_from_text(testing::chain_network(100), "1;0,1,2,3\n2;3,4\n");
  // 0.5 · ln(100 / 4), evaluated at 30 digits.
  EXPECT_NEAR(segment_weight(ds, TrajectoryId{1}, SegmentId{3}), 1.60943791243410037460, 1e-12);
}

TEST(SegmentWeight, TrajectoryCoveringNetworkHasNoWeight) {
  auto ds = dataset_from_text(testing::chain_network(3), "1;0,1,2\n");
  EXPECT_EQ(segment_weight(ds, TrajectoryId{1}, SegmentId{1}), 0.0);
  // Its segments have zero-norm vectors: they stay as isolated vertices.
  auto g = build_segment_similarity_graph(ds);
  EXPECT_EQ(g.vertices.size(), 3u);
  EXPECT_EQ(g.graph.edge_count(), 0u);
  EXPECT_EQ(g.zero_norm.size(), 3u);
}

TEST(SegmentWeight, TermFactorsSumToOnePerSegment) {
  auto net = testing::grid_network(6, 6);
  GeneratorConfig cfg;
  cfg.n_trajectories = 40;
  cfg.n_archetypes = 4;
  cfg.detour_probability = 0.2;
  cfg.seed = 11;
  auto ds = generate_dataset(net, cfg).dataset;
  for (auto sp : ds.visited_segments()) {
    double tf = 0.0;
    for (const auto& v : ds.visits_at(sp)) {
      tf += static_cast<double>(v.count) / static_cast<double>(ds.total_visits_at(sp));
    }
    EXPECT_NEAR(tf, 1.0, 1e-12);
  }
}

TEST(SegmentSimilarity, SelfDisjointAndOracle) {
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1,2\n2;2,3,4,5\n3;5,6,7,8,9\n");
  EXPECT_NEAR(segment_similarity(ds, SegmentId{3}, SegmentId{3}), 1.0, 1e-12);
  EXPECT_EQ(segment_similarity(ds, SegmentId{0}, SegmentId{7}), 0.0);

  // s_i = 2 visited by {T1, T2}; s_j = 5 by {T2, T3}. 30-digit evaluation:
  const double frozen = 0.482988350655318356878;
  const double sim = segment_similarity(ds, SegmentId{2}, SegmentId{5});
  EXPECT_NEAR(sim, frozen, 1e-12);
  const auto dense = testing::dense_segment_vectors(ds);
  EXPECT_NEAR(sim, testing::dense_cosine(dense.at(2), dense.at(5)), 1e-12);
  EXPECT_EQ(sim, segment_similarity(ds, SegmentId{5}, SegmentId{2}));
}

TEST(SegmentGraph, DisjointTrajectoriesGiveCliquesOnly) {
  auto ds = dataset_from_text(testing::chain_network(12), "1;0,1,2\n2;4,5,6,7\n3;9,10\n");
  auto g = build_segment_similarity_graph(ds);
  EXPECT_EQ(g.vertices.size(), 9u);
  EXPECT_EQ(g.graph.edge_count(), 3u + 6u + 1u);
  for (const auto& e : g.graph.edges()) EXPECT_NEAR(e.weight, 1.0, 1e-12);
  EXPECT_EQ(g.excluded.size(), 3u);
}

TEST(SegmentGraph, SingleSharedTrajectory) {
  // Segments 0 and 1 appear together only in T1; T2 and T3 touch one each.
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1\n2;1,2,3\n3;5,6,7,8\n");
  auto g = build_segment_similarity_graph(ds);
  bool found = false;
  for (const auto& e : g.graph.edges()) {
    if (g.vertices[e.u] == SegmentId{0} && g.vertices[e.v] == SegmentId{1}) {
      found = true;
      EXPECT_NEAR(e.weight, segment_similarity(ds, SegmentId{0}, SegmentId{1}), 1e-15);
    }
  }
  EXPECT_TRUE(found);
  const auto naive = testing::naive_segment_edges(ds);
  EXPECT_EQ(naive.size(), g.graph.edge_count());
}

TEST(SegmentGraph, EmptyDataset) {
  TrajectoryDataset ds(testing::chain_network(4), {});
  auto g = build_segment_similarity_graph(ds);
  EXPECT_TRUE(g.vertices.empty());
  EXPECT_EQ(g.graph.edge_count(), 0u);
  EXPECT_EQ(g.excluded.size(), 4u);
}

TEST(SegmentGraph, MatchesNaiveAllPairsOnRandomDatasets) {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    auto net = testing::grid_network(3 + rng.below(3), 3 + rng.below(3));  // up to 80 segments
    GeneratorConfig cfg;
    cfg.n_trajectories = 1 + rng.below(10);
    cfg.n_archetypes = 1 + rng.below(4);
    cfg.detour_probability = 0.3;
    cfg.od_jitter = 1;
    cfg.seed = rng();
    auto ds = generate_dataset(net, cfg).dataset;
    auto g = build_segment_similarity_graph(ds);
    const auto naive = testing::naive_segment_edges(ds);
    ASSERT_EQ(g.graph.edge_count(), naive.size());
    for (const auto& e : g.graph.edges()) {
      auto it = naive.find({g.vertices[e.u].value, g.vertices[e.v].value});
      ASSERT_NE(it, naive.end());
      EXPECT_NEAR(e.weight, it->second, 1e-10);
      EXPECT_GT(e.weight, 0.0);
      EXPECT_LE(e.weight, 1.0);
      // Every edge needs a common trajectory.
      bool shared = false;
      for (const auto& a : ds.visits(g.vertices[e.u])) {
        for (const auto& b : ds.visits(g.vertices[e.v])) shared |= a.trajectory == b.trajectory;
      }
      EXPECT_TRUE(shared);
    }
  }
}

TEST(SegmentGraph, ThreadCountDoesNotChangeOutput) {
  auto net = testing::grid_network(12, 12);
  GeneratorConfig cfg;
  cfg.n_trajectories = 80;
  cfg.n_archetypes = 8;
  cfg.detour_probability = 0.2;
  cfg.od_jitter = 2;
  cfg.seed = 3;
  auto ds = generate_dataset(net, cfg).dataset;
  auto one = build_segment_similarity_graph(ds, 1);
  auto four = build_segment_similarity_graph(ds, 4);
  ASSERT_EQ(one.graph.edge_count(), four.graph.edge_count());
  EXPECT_TRUE(std::equal(one.graph.edges().begin(), one.graph.edges().end(), four.graph.edges().begin()));
}

TEST(TrajectoryGraph, IdenticalAndDisjoint) {
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1,2\n2;0,1,2\n3;5,6\n4;7,8\n");
  EXPECT_NEAR(trajectory_similarity(ds, TrajectoryId{1}, TrajectoryId{2}), 1.0, 1e-12);
  EXPECT_EQ(trajectory_similarity(ds, TrajectoryId{3}, TrajectoryId{4}), 0.0);
  auto g = build_trajectory_similarity_graph(ds);
  ASSERT_EQ(g.graph.edge_count(), 1u);
  EXPECT_EQ(g.vertices[g.graph.edges()[0].u], TrajectoryId{1});
  EXPECT_EQ(g.vertices[g.graph.edges()[0].v], TrajectoryId{2});
}

TEST(TrajectoryGraph, OneSharedSegmentMatchesDenseOracle) {
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1,2\n2;2,3\n3;5,6,7\n");
  const double frozen = 0.0874311036726220507776;  // 30-digit evaluation
  EXPECT_NEAR(trajectory_similarity(ds, TrajectoryId{1}, TrajectoryId{2}), frozen, 1e-12);
  const auto dense = testing::dense_trajectory_vectors(ds);
  EXPECT_NEAR(frozen, testing::dense_cosine(dense.at(1), dense.at(2)), 1e-12);
  auto g = build_trajectory_similarity_graph(ds);
  ASSERT_EQ(g.graph.edge_count(), 1u);
  EXPECT_NEAR(g.graph.edges()[0].weight, frozen, 1e-12);
}

TEST(GraphExport, WritesIdsAndNineDigits) {
  auto ds = dataset_from_text(testing::chain_network(10), "1;0,1,2\n2;2,3,4,5\n3;5,6,7,8,9\n");
  auto g = build_segment_similarity_graph(ds);
  std::ostringstream os;
  write_graph_edges(os, g);
  EXPECT_NE(os.str().find("2,5,0.482988351\n"), std::string::npos) << os.str();
}

}  // namespace
}  // namespace netseg
