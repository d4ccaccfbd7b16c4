#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "disene/downstream.hpp"
#include "disene/explain.hpp"
#include "disene/graph.hpp"
#include "disene/metrics.hpp"
#include "disene/training.hpp"

namespace disene {

using Json = nlohmann::ordered_json;

// "V K" header, then one row of K values per node (%.17g, exact round trip).
void WriteEmbeddingText(const Matrix& H, const std::filesystem::path& path);
Matrix ReadEmbeddingText(const std::filesystem::path& path);

// Little-endian: uint32 V, uint32 K, then V*K float32 values row by row.
void WriteEmbeddingBinary(const Matrix& H, const std::filesystem::path& path);
Matrix ReadEmbeddingBinary(const std::filesystem::path& path);

Json ToJson(const LossTerms& terms);
Json ToJson(const MaybeScalar& value);

// Checkpoint = embedding.txt + embedding.bin + checkpoint.json in `dir`.
struct Checkpoint {
  Matrix H;
  Json sidecar;  // config, seed, final loss, epoch trace
};
void WriteCheckpoint(const std::filesystem::path& dir, const Matrix& H, const Json& sidecar);
Checkpoint ReadCheckpoint(const std::filesystem::path& dir);

// One object per dimension: {"dim", "edges": [edge index], "weights": [...]}.
Json ExplanationToJson(const Explanation& explanation);
void WriteExplanationJson(const Explanation& explanation, const std::filesystem::path& path);
// u,v,weight,dim with node tokens (dense indices for generated graphs).
void WriteExplanationTriplets(const Explanation& explanation, const Graph& g,
                              const std::filesystem::path& path);

// Communities as lists of edge indices, i.e. line numbers of the edge file
// written by WriteEdgeList, which follows EdgeId order.
void WriteGroundTruthJson(const GroundTruth& truth, std::size_t num_edges,
                          const std::filesystem::path& path);
// Maps line indices through `edge_file` to edges of g. Communities whose
// edges fall outside g (dropped by the component filter) lose those edges.
// Labels are taken from the communities: first community wins, others -1.
GroundTruth ReadGroundTruthJson(const std::filesystem::path& path, const Graph& g,
                                const std::filesystem::path& edge_file);

Json ToJson(const MetricsReport& report);
void WriteJson(const Json& value, const std::filesystem::path& path);
Json ReadJson(const std::filesystem::path& path);

// instance,g_index,plausibility
void WriteInstanceCsv(const TaskResult& result, const Graph& g, const std::filesystem::path& path);
Json ToJson(const TaskResult& result);

// Line tokenizer shared by the edge-file readers: skips blank and '#' lines.
std::vector<std::pair<std::string, std::string>> ReadTokenPairs(const std::filesystem::path& path);

// Node token for output: the original token, else the dense index.
std::string NodeToken(const Graph& g, NodeId u);

}  // namespace disene
