#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "disene/explain.hpp"
#include "disene/model.hpp"
#include "disene/synth.hpp"
#include "disene/training.hpp"
#include "test_util.hpp"

namespace disene {
namespace {

using testing::MakeGraph;
using testing::RandomConnectedGraph;
using testing::RandomMatrix;

// Nodes a, b, c, d = 0..3 with edges (a,b) and (c,d).
struct Toy {
  Graph g = MakeGraph(4, {{0, 1}, {2, 3}});
  Matrix H = (Matrix(4, 1) << 1, 2, 3, 0).finished();
};

TEST(Attribution, HandExample) {
  Toy t;
  const auto all = AllEdgeIds(t.g);
  const auto ctx = BuildAttributionContext(t.H, t.g, all);
  EXPECT_DOUBLE_EQ(ctx.mean_products[0], 1.0);
  EXPECT_DOUBLE_EQ(Attribution(t.H, ctx, 0, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(Attribution(t.H, ctx, 0, 2, 3), -1.0);

  const auto ex = BuildExplanations(t.H, t.g, all);
  ASSERT_EQ(ex.dims.size(), 1u);
  const EdgeId ab = *t.g.edge_id(0, 1);
  EXPECT_EQ(ex.dims[0].edges, std::vector<EdgeId>{ab});
  EXPECT_EQ(ex.dims[0].nodes, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(ex.dims[0].mask.weights, std::vector<double>{1.0});
  EXPECT_EQ(ex.num_empty(), 0u);
}

TEST(Attribution, ConstantColumnGivesEmptyDimension) {
  const Graph g = RandomConnectedGraph(10, 8, 1);
  Matrix H = RandomMatrix(10, 3, 2);
  H.col(1).setConstant(0.7);
  const auto ex = BuildExplanations(H, g, AllEdgeIds(g));
  EXPECT_TRUE(ex.dims[1].empty());
  EXPECT_EQ(ex.num_empty(), 1u);
}

TEST(Attribution, MeanCenteringAndReconstruction) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = RandomConnectedGraph(25, 30, seed);
    const Matrix H = RandomMatrix(25, 5, seed + 1);
    const auto all = AllEdgeIds(g);
    const auto ctx = BuildAttributionContext(H, g, all);
    for (std::size_t d = 0; d < 5; ++d) {
      double sum = 0;
      for (EdgeId e : all) sum += Attribution(H, ctx, d, g.edges()[e].u, g.edges()[e].v);
      EXPECT_LE(std::abs(sum), 1e-6 * static_cast<double>(all.size()));
    }
    // logit = sum_d phi_d + sum_d mu_d for edges and non-edges alike.
    for (NodeId u = 0; u < 25; u += 3) {
      const NodeId v = (u * 7 + 1) % 25;
      double total = 0;
      for (std::size_t d = 0; d < 5; ++d) total += Attribution(H, ctx, d, u, v);
      total += ctx.mean_products.sum();
      const double p = EdgeLikelihood(H, u, v);
      EXPECT_NEAR(total, std::log(p / (1 - p)), 1e-9);
    }
  }
}

TEST(Explanation, MasksArePositiveSubsetsOfBackground) {
  const Graph g = RandomConnectedGraph(30, 40, 5);
  const Matrix H = RandomMatrix(30, 6, 6);
  std::vector<EdgeId> background;
  for (EdgeId e = 0; e < g.num_edges(); e += 2) background.push_back(e);
  const auto ex = BuildExplanations(H, g, background);
  for (const auto& dim : ex.dims) {
    EXPECT_EQ(dim.mask.keys, dim.edges);
    for (double w : dim.mask.weights) EXPECT_GT(w, 0.0);
    for (EdgeId e : dim.edges) EXPECT_TRUE(std::binary_search(background.begin(), background.end(), e));
    std::vector<NodeId> nodes;
    for (EdgeId e : dim.edges) {
      nodes.push_back(g.edges()[e].u);
      nodes.push_back(g.edges()[e].v);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    EXPECT_EQ(dim.nodes, nodes);
  }
}

TEST(Explanation, EmptyBackgroundThrows) {
  const Graph g = MakeGraph(2, {{0, 1}});
  EXPECT_THROW(BuildExplanations(Matrix::Ones(2, 2), g, {}), Error);
}

TEST(Affiliation, MatchesDoubleLoop) {
  const Graph g = MakeGraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const Matrix H = RandomMatrix(4, 3, 9);
  const auto ex = BuildExplanations(H, g, AllEdgeIds(g));
  const Matrix F = AffiliationMatrix(H, ex);
  for (NodeId u = 0; u < 4; ++u) {
    for (std::size_t d = 0; d < 3; ++d) {
      double want = 0;
      for (NodeId v : ex.dims[d].nodes) want += H(u, d) * H(v, d) - ex.context.mean_products[d];
      EXPECT_NEAR(F(u, d), want, 1e-12);
    }
  }
  Matrix flat = H;
  flat.col(2).setConstant(1.0);
  const auto ex2 = BuildExplanations(flat, g, AllEdgeIds(g));
  EXPECT_TRUE(AffiliationMatrix(flat, ex2).col(2).isZero());
}

// The exact column is affine in H_{:,d} (slope sum_{v in V_d} h_d(v), offset
// -|V_d| mu_d), so it correlates perfectly with S_d H_{:,d}; the offset keeps
// the raw cosine a little under 1 (0.94 to 0.97 on this run).
TEST(Affiliation, ApproximationTracksExactOnRing) {
  const auto data = GenerateSynthetic(DefaultSpec(SynthKind::kRingCliques));
  TrainOptions o;
  o.output_dim = 16;
  o.loss.seed = 1;
  o.walk.seed = 2;
  const auto r = Train(data.graph, o);
  const auto ex = BuildExplanations(r.H, data.graph, AllEdgeIds(data.graph));
  const Matrix F = AffiliationMatrix(r.H, ex);
  const Vector S = AffiliationColumnStats(r.H);
  std::size_t checked = 0;
  for (Eigen::Index d = 0; d < F.cols(); ++d) {
    if (ex.dims[static_cast<std::size_t>(d)].empty()) continue;
    const Vector exact = F.col(d), approx = S[d] * r.H.col(d);
    const Vector ce = exact.array() - exact.mean(), ca = approx.array() - approx.mean();
    EXPECT_NEAR(ce.dot(ca) / (ce.norm() * ca.norm()), 1.0, 1e-9) << "dim " << d;
    EXPECT_GE(exact.dot(approx) / (exact.norm() * approx.norm()), 0.9) << "dim " << d;
    ++checked;
  }
  EXPECT_GT(checked, 0u);
}

}  // namespace
}  // namespace disene
