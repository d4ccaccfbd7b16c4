#include <gtest/gtest.h>

#include <cstring>

#include "disene/io.hpp"
#include "disene/synth.hpp"
#include "test_util.hpp"

namespace disene {
namespace {

using testing::ReadText;
using testing::TempDir;
using testing::WriteText;

TEST(Embedding, TextRoundTripIsExact) {
  TempDir tmp;
  const Matrix H = testing::RandomMatrix(7, 3, 1, -1, 1);
  WriteEmbeddingText(H, tmp / "h.txt");
  EXPECT_EQ(ReadEmbeddingText(tmp / "h.txt"), H);
  EXPECT_EQ(ReadText(tmp / "h.txt").substr(0, 4), "7 3\n");
}

TEST(Embedding, BinaryLayout) {
  TempDir tmp;
  Matrix H(2, 2);
  H << 1.5, -2, 0.25, 3;
  WriteEmbeddingBinary(H, tmp / "h.bin");
  const std::string raw = ReadText(tmp / "h.bin");
  ASSERT_EQ(raw.size(), 8u + 4 * 4);
  std::uint32_t header[2];
  std::memcpy(header, raw.data(), 8);
  EXPECT_EQ(header[0], 2u);
  EXPECT_EQ(header[1], 2u);
  float first;
  std::memcpy(&first, raw.data() + 8, 4);
  EXPECT_EQ(first, 1.5f);
  EXPECT_EQ(ReadEmbeddingBinary(tmp / "h.bin"), H);
}

TEST(Embedding, MalformedInputThrows) {
  TempDir tmp;
  WriteText(tmp / "bad.txt", "2 2\n1 2\n3\n");
  EXPECT_THROW(ReadEmbeddingText(tmp / "bad.txt"), Error);
  WriteText(tmp / "short.bin", "abc");
  EXPECT_THROW(ReadEmbeddingBinary(tmp / "short.bin"), Error);
  EXPECT_THROW(ReadEmbeddingText(tmp / "missing.txt"), Error);
}

TEST(Checkpoint, RoundTrip) {
  TempDir tmp;
  const Matrix H = testing::RandomMatrix(4, 2, 3);
  Json side;
  side["seed"] = 5;
  WriteCheckpoint(tmp / "ck", H, side);
  const auto ck = ReadCheckpoint(tmp / "ck");
  EXPECT_EQ(ck.H, H);
  EXPECT_EQ(ck.sidecar["seed"], 5);
  EXPECT_TRUE(std::filesystem::exists(tmp / "ck" / "embedding.bin"));
}

TEST(GroundTruth, JsonRoundTripThroughEdgeFile) {
  TempDir tmp;
  auto spec = DefaultSpec(SynthKind::kBaCliques);
  spec.num_cliques = 3;
  spec.base_nodes = 20;
  const auto data = GenerateSynthetic(spec);
  WriteEdgeList(data.graph, tmp / "g.edges");
  WriteGroundTruthJson(data.truth, data.graph.num_edges(), tmp / "g.gt.json");
  const Graph g = LoadEdgeList(tmp / "g.edges");
  const auto truth = ReadGroundTruthJson(tmp / "g.gt.json", g, tmp / "g.edges");
  ASSERT_EQ(truth.communities.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(truth.communities[c].edges, data.truth.communities[c].edges);
    EXPECT_EQ(truth.communities[c].nodes, data.truth.communities[c].nodes);
  }
  EXPECT_EQ(truth.labels, data.truth.labels);
}

TEST(GroundTruth, EdgesOutsideTheComponentAreDropped) {
  TempDir tmp;
  WriteText(tmp / "g.edges", "a b\nb c\na c\nx y\n");
  WriteText(tmp / "gt.json", R"({"num_edges": 4, "communities": [[0, 1, 2], [3]]})");
  const Graph g = LoadEdgeList(tmp / "g.edges");
  const auto truth = ReadGroundTruthJson(tmp / "gt.json", g, tmp / "g.edges");
  ASSERT_EQ(truth.communities.size(), 1u);
  EXPECT_EQ(truth.communities[0].edges.size(), 3u);
  WriteText(tmp / "bad.json", R"({"communities": [[9]]})");
  EXPECT_THROW(ReadGroundTruthJson(tmp / "bad.json", g, tmp / "g.edges"), Error);
}

TEST(Explanation, JsonAndTriplets) {
  TempDir tmp;
  WriteText(tmp / "g.edges", "p q\nq r\n");
  const Graph g = LoadEdgeList(tmp / "g.edges");
  Matrix H(3, 1);
  H << 2, 1, 0;
  const auto ex = BuildExplanations(H, g, AllEdgeIds(g));
  const Json j = ExplanationToJson(ex);
  EXPECT_EQ(j["num_dims"], 1);
  EXPECT_EQ(j["empty_dims"], 0);
  EXPECT_EQ(j["dims"][0]["edges"].size(), 1u);
  EXPECT_DOUBLE_EQ(j["dims"][0]["weights"][0].get<double>(), 1.0);
  WriteExplanationTriplets(ex, g, tmp / "t.csv");
  EXPECT_EQ(ReadText(tmp / "t.csv"), "u,v,weight,dim\np,q,1,0\n");
}

TEST(Report, NullMetricsCarryReasons) {
  MetricsReport r;
  r.ovc = MaybeScalar::Null("needs K >= 3");
  const Json j = ToJson(r);
  EXPECT_TRUE(j["comprehensibility"].is_null());
  EXPECT_TRUE(j["ovc"].is_null());
  EXPECT_EQ(j["ovc_reason"], "needs K >= 3");
  EXPECT_FALSE(j.contains("poc"));
}

}  // namespace
}  // namespace disene
