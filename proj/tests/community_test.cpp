#include <gtest/gtest.h>

#include <cmath>

#include "netseg/community.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace netseg {
namespace {

std::vector<std::uint32_t> labels_of(const Partition& p) { return p.membership; }

/// Checks that no merge of two communities and no move of one vertex (to an
/// existing community or a new singleton) raises Q by more than `tol`.
void expect_locally_optimal(const WeightedGraph& g, const Partition& p, double tol = 1e-10) {
  const auto w = testing::dense_weights(g);
  const double q = testing::naive_modularity(w, p.membership);
  for (std::uint32_t a = 0; a < p.K; ++a) {
    for (std::uint32_t b = a + 1; b < p.K; ++b) {
      auto merged = p.membership;
      for (auto& l : merged) {
        if (l == b) l = a;
      }
      EXPECT_LE(testing::naive_modularity(w, merged), q + tol) << "merge " << a << "+" << b;
    }
  }
  for (std::size_t v = 0; v < p.size(); ++v) {
    for (std::uint32_t c = 0; c <= p.K; ++c) {
      if (c == p.membership[v]) continue;
      auto moved = p.membership;
      moved[v] = c;
      EXPECT_LE(testing::naive_modularity(w, moved), q + tol) << "move " << v << "->" << c;
    }
  }
}

TEST(Modularity, TwoTrianglesFixtureValues) {
  const auto g = testing::two_triangles();
  EXPECT_NEAR(modularity(g, Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1})), 5.0 / 14.0, 1e-12);
  EXPECT_EQ(modularity(g, Partition::single(6)), 0.0);
  EXPECT_NEAR(modularity(g, Partition::singletons(6)), -34.0 / 196.0, 1e-12);
}

TEST(Modularity, SingleCommunityIsExactlyZero) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    auto g = testing::random_graph(2 + rng.below(60), 0.3, rng);
    EXPECT_EQ(modularity(g, Partition::single(g.vertex_count())), 0.0);
  }
}

TEST(Modularity, MatchesOrderedPairDefinitionAndBounds) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(30);
    auto g = testing::random_graph(n, 0.25, rng);
    std::vector<std::uint32_t> labels(n);
    const auto k = 1 + rng.below(n);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(k));
    const auto p = Partition::from_labels(labels);
    const double q = modularity(g, p);
    EXPECT_NEAR(q, testing::naive_modularity(testing::dense_weights(g), p.membership), 1e-12);
    EXPECT_GE(q, -0.5 - 1e-12);
    EXPECT_LE(q, 1.0);
  }
}

TEST(Modularity, EmptyGraphAndMismatch) {
  WeightedGraph g(3, {});
  EXPECT_EQ(modularity(g, Partition::singletons(3)), 0.0);
  EXPECT_THROW(modularity(g, Partition::singletons(4)), InputError);
  Partition gap;
  gap.K = 3;
  gap.membership = {0, 2, 2};
  EXPECT_THROW(modularity(g, gap), InputError);
}

TEST(Partition, FromLabelsCompactsInLabelOrder) {
  const auto p = Partition::from_labels(std::vector<std::uint32_t>{7, 3, 7, 9});
  EXPECT_EQ(p.K, 3u);
  EXPECT_EQ(p.membership, (std::vector<std::uint32_t>{1, 0, 1, 2}));
  EXPECT_TRUE(p.valid());
}

TEST(GreedyPartition, TwoTrianglesMatchExhaustiveOptimum) {
  const auto g = testing::two_triangles();
  const auto best = testing::exhaustive_best_partition(g);
  EXPECT_EQ(best.enumerated, 203u);  // Bell(6)
  const auto p = greedy_partition(g);
  EXPECT_EQ(testing::canonical(labels_of(p)), testing::canonical(best.labels));
  EXPECT_NEAR(modularity(g, p), best.q, 1e-12);
  EXPECT_NEAR(best.q, 5.0 / 14.0, 1e-12);
}

TEST(GreedyPartition, DisjointFourCliquesMatchExhaustiveOptimum) {
  const auto g = testing::cliques({4, 4});
  const auto best = testing::exhaustive_best_partition(g);
  EXPECT_EQ(best.enumerated, 4140u);  // Bell(8)
  const auto p = greedy_partition(g);
  EXPECT_EQ(p.membership, (std::vector<std::uint32_t>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_NEAR(modularity(g, p), 0.5, 1e-12);
  EXPECT_NEAR(best.q, 0.5, 1e-12);
}

TEST(GreedyPartition, DegenerateGraphs) {
  EXPECT_EQ(greedy_partition(WeightedGraph(1, {})).K, 1u);
  // No edges: nothing to merge, every vertex stays alone.
  EXPECT_EQ(greedy_partition(WeightedGraph(4, {})).K, 4u);
  EXPECT_THROW(greedy_partition(WeightedGraph(0, {})), InputError);
  // A single edge is one community (merging gains 1/2).
  EXPECT_EQ(greedy_partition(WeightedGraph(2, {{0, 1, 3.0}})).K, 1u);
}

TEST(GreedyPartition, TrackedGainsMatchFullEvaluation) {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    auto g = testing::random_graph(10 + rng.below(91), 0.08, rng);
    const auto w = testing::dense_weights(g);
    std::size_t steps = 0;
    double last = -1.0;
    auto p = greedy_partition(g, [&](std::span<const std::uint32_t> labels, double q) {
      std::vector<std::uint32_t> l(labels.begin(), labels.end());
      EXPECT_NEAR(q, testing::naive_modularity(w, l), 1e-9);
      EXPECT_GT(q, last);
      last = q;
      ++steps;
    });
    EXPECT_GT(steps, 0u);
    EXPECT_NEAR(modularity(g, p), last, 1e-9);
  }
}

TEST(GreedyPartition, LocallyOptimalOnRandomGraphs) {
  Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    auto g = testing::random_graph(4 + rng.below(27), 0.15 + 0.3 * rng.uniform(), rng);
    const auto p = greedy_partition(g);
    ASSERT_TRUE(p.valid());
    expect_locally_optimal(g, p);
  }
}

TEST(GreedyPartition, Deterministic) {
  Rng rng(3);
  auto g = testing::random_graph(80, 0.1, rng);
  EXPECT_EQ(greedy_partition(g), greedy_partition(g));
}

TEST(GreedyPartition, NeverExceedsExhaustiveOptimum) {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    auto g = testing::random_graph(4 + rng.below(5), 0.5, rng);
    const auto best = testing::exhaustive_best_partition(g);
    const double q = modularity(g, greedy_partition(g));
    EXPECT_LE(q, best.q + 1e-12);
  }
}

TEST(RefinePartition, LeavesOptimalPartitionUnchanged) {
  const auto g = testing::two_triangles();
  const auto p = Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
  EXPECT_EQ(refine_partition(g, p), p);
}

TEST(RefinePartition, MovesMisassignedVertex) {
  const auto g = testing::two_triangles();
  const auto p = Partition::from_labels(std::vector<std::uint32_t>{0, 0, 1, 1, 1, 1});
  const auto r = refine_partition(g, p);
  EXPECT_EQ(r.membership, (std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1}));
  EXPECT_GT(modularity(g, r), modularity(g, p));
}

TEST(RefinePartition, EmptyCommunityIndicesAreCompacted) {
  const auto g = testing::two_triangles();
  Partition p;
  p.K = 3;
  p.membership = {0, 0, 0, 2, 2, 2};
  const auto r = refine_partition(g, p);
  EXPECT_EQ(r.K, 2u);
  EXPECT_TRUE(r.valid());
  EXPECT_EQ(r.membership, (std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1}));
}

TEST(RefinePartition, NeverDecreasesModularity) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 5 + rng.below(40);
    auto g = testing::random_graph(n, 0.2, rng);
    std::vector<std::uint32_t> labels(n);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(4));
    const auto p = Partition::from_labels(labels);
    const auto r = refine_partition(g, p);
    EXPECT_GE(modularity(g, r), modularity(g, p) - 1e-12);
  }
}

}  // namespace
}  // namespace netseg
