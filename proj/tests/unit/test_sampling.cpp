#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "disene/sampling.hpp"
#include "test_util.hpp"

namespace disene {
namespace {

using testing::MakeGraph;
using testing::RandomConnectedGraph;

TEST(Walks, SingleEdgeAlternates) {
  const Graph g = MakeGraph(2, {{0, 1}});
  WalkConfig cfg;
  cfg.walk_length = 4;
  cfg.num_walks = 1;
  cfg.window = 1;
  const auto walks = GenerateWalks(g, cfg);
  ASSERT_EQ(walks.size(), 2u);
  EXPECT_EQ(walks[0], (Walk{0, 1, 0, 1}));
  EXPECT_EQ(walks[1], (Walk{1, 0, 1, 0}));
}

TEST(Walks, CountLengthAndAdjacency) {
  const Graph g = RandomConnectedGraph(320, 300, 2);
  WalkConfig cfg;
  const auto walks = GenerateWalks(g, cfg);
  ASSERT_EQ(walks.size(), 3200u);
  for (std::size_t i = 0; i < walks.size(); ++i) {
    ASSERT_EQ(walks[i].size(), cfg.walk_length);
    EXPECT_EQ(walks[i][0], i / cfg.num_walks);
    for (std::size_t t = 1; t < walks[i].size(); ++t) EXPECT_TRUE(g.has_edge(walks[i][t - 1], walks[i][t]));
  }
}

TEST(Walks, IndependentOfThreadCount) {
  const Graph g = RandomConnectedGraph(100, 150, 4);
  WalkConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(GenerateWalks(g, cfg, 1), GenerateWalks(g, cfg, 3));
}

TEST(Walks, TriangleNextHopIsUniform) {
  const Graph g = MakeGraph(3, {{0, 1}, {1, 2}, {0, 2}});
  WalkConfig cfg;
  cfg.walk_length = 10001;
  cfg.num_walks = 1;
  cfg.seed = 3;
  const auto walks = GenerateWalks(g, cfg);
  std::map<std::pair<NodeId, NodeId>, int> hops;
  std::map<NodeId, int> from;
  for (std::size_t t = 1; t < walks[0].size(); ++t) {
    ++hops[{walks[0][t - 1], walks[0][t]}];
    ++from[walks[0][t - 1]];
  }
  for (auto [key, count] : hops) {
    EXPECT_NEAR(static_cast<double>(count) / from[key.first], 0.5, 0.03);
  }
}

TEST(Pairs, WindowOneEnumeration) {
  const std::vector<Walk> walks{{0, 1, 2}};
  auto pairs = PairsFromWalks(walks, 1);
  std::sort(pairs.begin(), pairs.end());
  EXPECT_EQ(pairs, (std::vector<NodePair>{{0, 1}, {1, 0}, {1, 2}, {2, 1}}));
}

TEST(Pairs, SelfPairsDropped) {
  const std::vector<Walk> walks{{4, 4, 4}};
  EXPECT_TRUE(PairsFromWalks(walks, 2).empty());
}

TEST(Pairs, WindowClampedAtBoundary) {
  const std::vector<Walk> walks{{0, 1}};
  auto pairs = PairsFromWalks(walks, 5);
  std::sort(pairs.begin(), pairs.end());
  EXPECT_EQ(pairs, (std::vector<NodePair>{{0, 1}, {1, 0}}));
}

// Corpus size = sum over walks and positions of valid offsets, times 2,
// minus self pairs; every pair lies within `window` steps on its walk.
TEST(Pairs, CorpusMatchesReplay) {
  const Graph g = RandomConnectedGraph(30, 20, 8);
  WalkConfig cfg;
  cfg.walk_length = 12;
  cfg.num_walks = 3;
  cfg.window = 4;
  const auto walks = GenerateWalks(g, cfg);
  std::multiset<NodePair> expected;
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t d = 1; d <= cfg.window && i + d < w.size(); ++d) {
        if (w[i] == w[i + d]) continue;
        expected.insert({w[i], w[i + d]});
        expected.insert({w[i + d], w[i]});
      }
    }
  }
  const auto pairs = PairsFromWalks(walks, cfg.window);
  EXPECT_EQ(std::multiset<NodePair>(pairs.begin(), pairs.end()), expected);
}

TEST(Negatives, CountAndEndpoint) {
  const Graph g = RandomConnectedGraph(20, 10, 1);
  std::vector<NodePair> positives;
  for (NodeId i = 0; i < 100; ++i) positives.push_back({i % 20, (i + 1) % 20});
  for (std::size_t k : {1u, 3u}) {
    const auto neg = SampleNegatives(g, positives, k, 5);
    ASSERT_EQ(neg.size(), k * positives.size());
    for (std::size_t i = 0; i < neg.size(); ++i) EXPECT_EQ(neg[i].second, positives[i / k].second);
  }
}

TEST(Negatives, TwoNodeFrequencies) {
  const Graph g = MakeGraph(2, {{0, 1}});
  std::vector<NodePair> positives(10000, NodePair{0, 1});
  const auto neg = SampleNegatives(g, positives, 1, 11);
  const auto zeros = std::count_if(neg.begin(), neg.end(), [](const NodePair& p) { return p.first == 0; });
  EXPECT_NEAR(static_cast<double>(zeros) / 10000.0, 0.5, 0.05);
}

TEST(Negatives, DeterministicGivenSeed) {
  const Graph g = RandomConnectedGraph(20, 10, 1);
  std::vector<NodePair> positives(50, NodePair{0, 1});
  EXPECT_EQ(SampleNegatives(g, positives, 2, 9), SampleNegatives(g, positives, 2, 9));
  EXPECT_NE(SampleNegatives(g, positives, 2, 9), SampleNegatives(g, positives, 2, 10));
}

TEST(Negatives, DegreeBiasedSkipsIsolatedNodes) {
  const Graph g = MakeGraph(4, {{0, 1}, {1, 2}});
  std::vector<NodePair> positives(2000, NodePair{0, 1});
  const auto neg = SampleNegatives(g, positives, 1, 3, NegativeDistribution::kDegreeBiased);
  EXPECT_TRUE(std::none_of(neg.begin(), neg.end(), [](const NodePair& p) { return p.first == 3; }));
}

TEST(Batch, NegativesPerPositive) {
  const Graph g = RandomConnectedGraph(40, 30, 6);
  WalkConfig cfg;
  cfg.negatives_per_positive = 2;
  const auto batch = BuildPairBatch(g, cfg);
  EXPECT_EQ(batch.negatives.size(), 2 * batch.positives.size());
}

TEST(WalkConfig, Validation) {
  WalkConfig cfg;
  cfg.window = cfg.walk_length;
  EXPECT_THROW(Validate(cfg), Error);
  cfg = WalkConfig{};
  cfg.num_walks = 0;
  EXPECT_THROW(Validate(cfg), Error);
  cfg = WalkConfig{};
  cfg.negatives_per_positive = 0;
  EXPECT_THROW(Validate(cfg), Error);
}

}  // namespace
}  // namespace disene
