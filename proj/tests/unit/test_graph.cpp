#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "disene/explain.hpp"
#include "disene/graph.hpp"
#include "test_util.hpp"

namespace disene {
namespace {

using testing::MakeGraph;
using testing::RandomConnectedGraph;
using testing::RandomGraph;
using testing::TempDir;
using testing::WriteText;

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(3, {{1, 1}}), Error);
  EXPECT_THROW(Graph(3, {{0, 1}, {0, 1}}), Error);
  EXPECT_THROW(Graph(3, {{0, 3}}), Error);
}

TEST(Graph, NeighborListsAreSortedAndSymmetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = RandomGraph(25, 0.2, seed);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      const auto nb = g.neighbors(u);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const auto back = g.neighbors(nb[i]);
        EXPECT_TRUE(std::binary_search(back.begin(), back.end(), u));
        const Edge e = g.edge(g.incident_edges(u)[i]);
        EXPECT_EQ(e, Edge::Canonical(u, nb[i]));
      }
    }
  }
}

TEST(Graph, EdgeIdLooksUpEitherOrientation) {
  const Graph g = MakeGraph(4, {{2, 0}, {1, 3}, {0, 1}});
  ASSERT_TRUE(g.edge_id(0, 2).has_value());
  EXPECT_EQ(g.edge_id(0, 2), g.edge_id(2, 0));
  EXPECT_EQ(g.edge(*g.edge_id(3, 1)), (Edge{1, 3}));
  EXPECT_FALSE(g.has_edge(2, 3));
}

TEST(LoadEdgeList, BuildsFromTokens) {
  TempDir dir;
  WriteText(dir / "a.txt", "a b\nb c\n");
  const Graph g = LoadEdgeList(dir / "a.txt");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(LoadEdgeList, DropsDuplicatesAndSelfLoops) {
  TempDir dir;
  WriteText(dir / "a.txt", "# comment\na b\nb a\na a\n\n");
  const Graph g = LoadEdgeList(dir / "a.txt");
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(LoadEdgeList, KeepsTheFirstOfEqualComponents) {
  TempDir dir;
  WriteText(dir / "a.txt", "x y\ny z\nz x\np q\nq r\nr p\n");
  const Graph g = LoadEdgeList(dir / "a.txt");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  std::set<std::string> ids(g.node_ids().begin(), g.node_ids().end());
  EXPECT_EQ(ids, (std::set<std::string>{"x", "y", "z"}));
}

TEST(LoadEdgeList, KeepsTheLargestComponent) {
  TempDir dir;
  WriteText(dir / "a.txt", "1 2\n3 4\n4 5\n5 3\n5 6\n");
  const Graph g = LoadEdgeList(dir / "a.txt");
  EXPECT_EQ(g.num_nodes(), 4u);
  EXPECT_EQ(g.num_edges(), 4u);
  // Numeric tokens are indexed in numeric order.
  EXPECT_EQ(g.node_ids(), (std::vector<std::string>{"3", "4", "5", "6"}));
}

TEST(LoadEdgeList, Errors) {
  TempDir dir;
  EXPECT_THROW(LoadEdgeList(dir / "missing.txt"), Error);
  WriteText(dir / "loops.txt", "a a\n");
  EXPECT_THROW(LoadEdgeList(dir / "loops.txt"), Error);
  WriteText(dir / "short.txt", "a\n");
  EXPECT_THROW(LoadEdgeList(dir / "short.txt"), Error);
}

TEST(LoadEdgeList, WriterRoundTripKeepsEdgeIds) {
  TempDir dir;
  const Graph g = RandomConnectedGraph(40, 60, 3);
  WriteEdgeList(g, dir / "g.edges");
  const Graph h = LoadEdgeList(dir / "g.edges");
  ASSERT_EQ(h.num_edges(), g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) EXPECT_EQ(g.edge(e), h.edge(e));
}

TEST(Labels, LoadAndCommunities) {
  TempDir dir;
  WriteText(dir / "g.txt", "a b\nb c\nc a\nc d\nd e\ne f\nf d\n");
  WriteText(dir / "l.txt", "a 0\nb 0\nc 0\nd 1\ne 1\nf 1\n");
  const Graph g = LoadEdgeList(dir / "g.txt");
  const auto labels = LoadLabels(dir / "l.txt", g);
  const auto truth = CommunitiesFromLabels(g, labels);
  ASSERT_EQ(truth.communities.size(), 2u);
  EXPECT_EQ(truth.communities[0].edges.size(), 3u);
  EXPECT_EQ(truth.communities[1].edges.size(), 3u);
  const auto bridge = *g.edge_id(2, 3);
  EXPECT_EQ(truth.EdgeIndex(g.num_edges())[bridge], -1);
}

TEST(Labels, TriangleOneCommunity) {
  const Graph g = MakeGraph(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<std::optional<int>> labels{0, 0, 0};
  const auto truth = CommunitiesFromLabels(g, labels);
  ASSERT_EQ(truth.communities.size(), 1u);
  EXPECT_EQ(truth.communities[0].edges.size(), 3u);
  EXPECT_EQ(truth.communities[0].nodes, (std::vector<NodeId>{0, 1, 2}));
}

TEST(Labels, CrossLabelEdgeGivesNoCommunity) {
  const Graph g = MakeGraph(2, {{0, 1}});
  const std::vector<std::optional<int>> labels{0, 1};
  EXPECT_TRUE(CommunitiesFromLabels(g, labels).communities.empty());
}

TEST(Labels, MissingLabelThrows) {
  const Graph g = MakeGraph(2, {{0, 1}});
  const std::vector<std::optional<int>> labels{0, std::nullopt};
  EXPECT_THROW(CommunitiesFromLabels(g, labels), Error);
}

TEST(Labels, CommunityEdgesNeverExceedGraphEdges) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = RandomGraph(30, 0.3, seed);
    Rng rng(seed);
    std::uniform_int_distribution<int> label(-1, 3);
    std::vector<std::optional<int>> labels(g.num_nodes());
    for (auto& l : labels) l = label(rng);
    const auto truth = CommunitiesFromLabels(g, labels);
    std::size_t total = 0;
    for (const auto& c : truth.communities) {
      total += c.edges.size();
      for (EdgeId e : c.edges) {
        const auto& edge = g.edge(e);
        EXPECT_EQ(*labels[edge.u], *labels[edge.v]);
        EXPECT_GE(*labels[edge.u], 0);
      }
    }
    EXPECT_LE(total, g.num_edges());
  }
}

TEST(SplitEdges, TenEdgeExample) {
  const Graph h = MakeGraph(11, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10}});
  ASSERT_EQ(h.num_edges(), 10u);
  const auto split = SplitEdges(h, 0.1, 7);
  EXPECT_EQ(split.test_edges.size(), 1u);
  EXPECT_EQ(split.train_edges.size(), 9u);
  EXPECT_EQ(split.test_negatives.size(), 1u);
}

TEST(SplitEdges, Deterministic) {
  const Graph g = RandomConnectedGraph(50, 80, 1);
  const auto a = SplitEdges(g, 0.2, 9), b = SplitEdges(g, 0.2, 9);
  EXPECT_EQ(a.test_edges, b.test_edges);
  EXPECT_EQ(a.train_edges, b.train_edges);
  EXPECT_EQ(a.test_negatives, b.test_negatives);
}

TEST(SplitEdges, CompleteGraphHasNoNegatives) {
  const Graph k4 = MakeGraph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  EXPECT_THROW(SplitEdges(k4, 0.5, 0), Error);
}

TEST(SplitEdges, TooSmallForATestEdge) {
  const Graph g = MakeGraph(3, {{0, 1}, {1, 2}});
  EXPECT_THROW(SplitEdges(g, 0.1, 0), Error);
}

TEST(SplitEdges, PartitionProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = RandomConnectedGraph(40, 50, seed);
    const double f = 0.05 + 0.04 * static_cast<double>(seed % 10);
    const auto split = SplitEdges(g, f, seed);
    EXPECT_EQ(split.test_edges.size(), static_cast<std::size_t>(std::llround(f * static_cast<double>(g.num_edges()))));
    EXPECT_EQ(split.test_negatives.size(), split.test_edges.size());
    std::vector<EdgeId> all = split.train_edges;
    all.insert(all.end(), split.test_edges.begin(), split.test_edges.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, AllEdgeIds(g));
    for (const auto& e : split.test_negatives) {
      EXPECT_NE(e.u, e.v);
      EXPECT_FALSE(g.has_edge(e.u, e.v));
    }
  }
}

TEST(Distances, PathAndAnchor) {
  const Graph g = MakeGraph(3, {{0, 1}, {1, 2}});
  const std::vector<NodeId> anchors{0};
  const auto d = DistancesToAnchors(g, anchors);
  EXPECT_EQ(d.at(0, 0), 0u);
  EXPECT_EQ(d.at(0, 2), 2u);
}

TEST(Distances, StarLeavesAtOneHop) {
  const Graph g = MakeGraph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const std::vector<NodeId> anchors{0};
  const auto d = DistancesToAnchors(g, anchors);
  for (NodeId v = 1; v < 6; ++v) EXPECT_EQ(d.at(0, v), 1u);
}

TEST(Distances, EmptyAnchorsThrow) {
  const Graph g = MakeGraph(2, {{0, 1}});
  EXPECT_THROW(DistancesToAnchors(g, {}), Error);
}

TEST(Distances, UnreachableSentinel) {
  const Graph g = MakeGraph(4, {{0, 1}, {2, 3}});
  const auto d = Bfs(g, 0);
  EXPECT_EQ(d[3], kUnreachable);
}

// Floyd-Warshall oracle.
std::vector<std::vector<std::uint32_t>> FloydWarshall(const Graph& g) {
  const auto n = g.num_nodes();
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, kUnreachable));
  for (NodeId u = 0; u < n; ++u) d[u][u] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] != kUnreachable && d[k][j] != kUnreachable && d[i][k] + d[k][j] < d[i][j]) {
          d[i][j] = d[i][k] + d[k][j];
        }
      }
    }
  }
  return d;
}

TEST(Distances, MatchFloydWarshallAndThreadCount) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = RandomGraph(30, 0.08, seed);
    const auto oracle = FloydWarshall(g);
    const auto seq = AllPairsDistances(g, 1);
    const auto par = AllPairsDistances(g, 4);
    EXPECT_EQ(seq.data, par.data);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v = 0; v < g.num_nodes(); ++v) EXPECT_EQ(seq.at(u, v), oracle[u][v]);
    }
  }
}

TEST(Distances, AdjacentNodesDifferByAtMostOne) {
  const Graph g = RandomConnectedGraph(60, 40, 5);
  const std::vector<NodeId> anchors{0, 17, 42};
  const auto d = DistancesToAnchors(g, anchors, 2);
  for (std::size_t r = 0; r < anchors.size(); ++r) {
    for (const auto& e : g.edges()) {
      const auto a = d.at(r, e.u), b = d.at(r, e.v);
      EXPECT_LE(a > b ? a - b : b - a, 1u);
    }
  }
}

}  // namespace
}  // namespace disene
