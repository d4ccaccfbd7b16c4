#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disene/common.hpp"

namespace disene {

// Immutable undirected simple graph in compressed sparse adjacency form.
//
// Edges are stored canonically (u < v) and sorted, so an EdgeId is the
// position of the edge in edges(). Neighbor lists are sorted and carry the
// id of the connecting edge.
class Graph {
 public:
  Graph() = default;

  // Throws Error on self-loops, duplicate edges or out-of-range endpoints.
  Graph(std::size_t num_nodes, std::vector<Edge> edges,
        std::vector<std::string> node_ids = {});

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }
  std::span<const EdgeId> incident_edges(NodeId u) const {
    return {incident_.data() + offsets_[u], incident_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  std::optional<EdgeId> edge_id(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return edge_id(u, v).has_value(); }

  // Original token per dense index; empty for generated graphs.
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  // Same node set restricted to the given edges of this graph.
  Graph Subgraph(std::span<const EdgeId> keep) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<EdgeId> incident_;
  std::vector<std::string> node_ids_;
};

struct Community {
  std::vector<NodeId> nodes;  // sorted
  std::vector<EdgeId> edges;  // sorted
};

// Ground-truth link communities plus an optional per-node label.
struct GroundTruth {
  std::vector<Community> communities;
  std::vector<int> labels;  // -1 marks background nodes

  // Community index per edge (-1 when the edge is in none). The first
  // community containing the edge wins.
  std::vector<int> EdgeIndex(std::size_t num_edges) const;
  std::vector<int> NodeIndex(std::size_t num_nodes) const;
};

struct EdgeSplit {
  std::vector<EdgeId> train_edges;  // sorted
  std::vector<EdgeId> test_edges;   // sorted
  std::vector<Edge> test_negatives;
};

// Reads a whitespace-separated edge list, drops self-loops and duplicates and
// keeps the largest connected component (ties: the one containing the
// earliest-seen token).
Graph LoadEdgeList(const std::filesystem::path& path);

// Reads "token label" lines; tokens are resolved through g.node_ids().
// Nodes without a line stay std::nullopt.
std::vector<std::optional<int>> LoadLabels(const std::filesystem::path& path, const Graph& g);

// One community per non-negative label, made of the intra-label edges.
// Negative labels mark background nodes. Throws if any node is unlabeled.
GroundTruth CommunitiesFromLabels(const Graph& g, std::span<const std::optional<int>> labels);

EdgeSplit SplitEdges(const Graph& g, double test_fraction, std::uint64_t seed);

// Uniform node pairs that are not edges of g, rejection-sampled.
std::vector<Edge> SampleNonEdges(const Graph& g, std::size_t count, Rng& rng);

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

// Hop distances, one row per anchor and one column per node.
struct HopMatrix {
  std::vector<NodeId> anchors;
  std::size_t num_nodes = 0;
  std::vector<std::uint32_t> data;

  std::uint32_t at(std::size_t anchor_row, NodeId node) const {
    return data[anchor_row * num_nodes + node];
  }
};

HopMatrix DistancesToAnchors(const Graph& g, std::span<const NodeId> anchors,
                             int threads = 1);

// All-pairs distances: row r is the BFS from node r.
HopMatrix AllPairsDistances(const Graph& g, int threads = 1);

std::vector<std::uint32_t> Bfs(const Graph& g, NodeId source);

// Edge list writer used by the generators: "u v" per line with node tokens.
void WriteEdgeList(const Graph& g, const std::filesystem::path& path);
void WriteLabels(const Graph& g, std::span<const int> labels, const std::filesystem::path& path);

}  // namespace disene
