#pragma once

#include <string>
#include <vector>

#include "disene/config.hpp"
#include "disene/downstream.hpp"
#include "disene/explain.hpp"
#include "disene/metrics.hpp"

namespace disene {

struct Dataset {
  std::string name;
  Graph graph;
  GroundTruth truth;  // no communities when none were supplied
  bool synthetic = false;
};

// Generates the synthetic graph or loads the files. Labels, when given,
// define the communities; otherwise the ground-truth JSON does.
Dataset LoadDataset(const DatasetConfig& config);

TrainOptions ToTrainOptions(const RunConfig& cfg, std::uint64_t seed);

// Empty test set when cfg.test_fraction is 0.
EdgeSplit SplitForRun(const Graph& g, const RunConfig& cfg, std::uint64_t seed);

struct TrainedRun {
  EdgeSplit split;
  TrainResult result;
};

// Trains on the training edges of the split (same node set).
TrainedRun TrainOnSplit(const Dataset& data, const RunConfig& cfg, std::uint64_t seed);

// Resolved config, seed, method, config hash, final loss and epoch trace.
Json CheckpointSidecar(const RunConfig& cfg, std::uint64_t seed, const Dataset& data, const TrainResult& result);

std::vector<EdgeId> BackgroundEdges(const Graph& g, const EdgeSplit& split, const RunConfig& cfg);

// Distances from every node that appears in some explanation subgraph.
HopMatrix ExplanationDistances(const Graph& g, const Explanation& explanation, int threads);

MetricsReport EvaluateRun(const Matrix& H, const Dataset& data, const Explanation& explanation,
                          const RunConfig& cfg, std::uint64_t seed);

// The node task needs background nodes (label -1) next to community nodes.
bool HasNodeTask(const GroundTruth& truth);

// Link task whenever the split has test edges, node task when defined.
std::vector<TaskResult> RunTasks(const Matrix& H, const Dataset& data, const EdgeSplit& split,
                                 const RunConfig& cfg, std::uint64_t seed);

}  // namespace disene
