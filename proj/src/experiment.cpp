#include "disene/experiment.hpp"

#include <algorithm>

namespace disene {

Dataset LoadDataset(const DatasetConfig& config) {
  Dataset data;
  if (config.synthetic) {
    auto synth = GenerateSynthetic(*config.synthetic);
    data.name = std::string(ToString(config.synthetic->kind));
    data.graph = std::move(synth.graph);
    data.truth = std::move(synth.truth);
    data.synthetic = true;
    return data;
  }
  data.name = config.edges.stem().string();
  data.graph = LoadEdgeList(config.edges);
  if (!config.labels.empty()) {
    const auto labels = LoadLabels(config.labels, data.graph);
    data.truth = CommunitiesFromLabels(data.graph, labels);
  }
  if (!config.ground_truth.empty()) {
    auto truth = ReadGroundTruthJson(config.ground_truth, data.graph, config.edges);
    if (config.labels.empty()) {
      data.truth = std::move(truth);
    } else {
      data.truth.communities = std::move(truth.communities);
    }
  }
  return data;
}

TrainOptions ToTrainOptions(const RunConfig& cfg, std::uint64_t seed) {
  const auto seeds = RunSeeds::From(seed);
  TrainOptions opts;
  opts.kind = cfg.encoder;
  opts.activation = cfg.activation;
  opts.hidden_dim = cfg.hidden_dim;
  opts.output_dim = cfg.output_dim;
  opts.loss = cfg.loss;
  opts.loss.seed = seeds.init;
  opts.walk = cfg.walk;
  opts.walk.seed = seeds.walk;
  opts.threads = cfg.deterministic ? 1 : cfg.threads;
  return opts;
}

EdgeSplit SplitForRun(const Graph& g, const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.test_fraction == 0) return EdgeSplit{AllEdgeIds(g), {}, {}};
  return SplitEdges(g, cfg.test_fraction, RunSeeds::From(seed).split);
}

TrainedRun TrainOnSplit(const Dataset& data, const RunConfig& cfg, std::uint64_t seed) {
  TrainedRun run;
  run.split = SplitForRun(data.graph, cfg, seed);
  const auto opts = ToTrainOptions(cfg, seed);
  if (run.split.test_edges.empty()) {
    run.result = Train(data.graph, opts);
  } else {
    run.result = Train(data.graph.Subgraph(run.split.train_edges), opts);
  }
  return run;
}

Json CheckpointSidecar(const RunConfig& cfg, std::uint64_t seed, const Dataset& data, const TrainResult& result) {
  Json trace = Json::array();
  for (const auto& t : result.trace) trace.push_back(ToJson(t));
  return Json{{"method", MethodLabel(cfg)},
              {"config_hash", ConfigHash(cfg)},
              {"seed", seed},
              {"dataset", data.name},
              {"num_nodes", data.graph.num_nodes()},
              {"num_edges", data.graph.num_edges()},
              {"config", ToJson(cfg)},
              {"final_loss", result.trace.empty() ? Json(nullptr) : ToJson(result.trace.back())},
              {"trace", trace}};
}

std::vector<EdgeId> BackgroundEdges(const Graph& g, const EdgeSplit& split, const RunConfig& cfg) {
  if (cfg.background == BackgroundSet::kAllEdges || split.train_edges.empty()) return AllEdgeIds(g);
  return split.train_edges;
}

HopMatrix ExplanationDistances(const Graph& g, const Explanation& explanation, int threads) {
  std::vector<NodeId> anchors;
  for (const auto& dim : explanation.dims) anchors.insert(anchors.end(), dim.nodes.begin(), dim.nodes.end());
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  if (anchors.empty()) return HopMatrix{{}, g.num_nodes(), {}};
  return DistancesToAnchors(g, anchors, threads);
}

MetricsReport EvaluateRun(const Matrix& H, const Dataset& data, const Explanation& explanation,
                          const RunConfig& cfg, std::uint64_t seed) {
  MetricsOptions opts;
  opts.overlap_consistency = cfg.ovc;
  opts.positional_coherence = cfg.poc;
  opts.num_permutations = cfg.num_permutations;
  opts.seed = RunSeeds::From(seed).permutation;
  std::optional<HopMatrix> distances;
  if (cfg.poc) distances = ExplanationDistances(data.graph, explanation, cfg.deterministic ? 1 : cfg.threads);
  auto report = EvaluateEmbedding(H, data.graph, data.truth, explanation, distances ? &*distances : nullptr, opts);
  report.metadata["dataset"] = data.name;
  report.metadata["method"] = MethodLabel(cfg);
  report.metadata["seed"] = std::to_string(seed);
  report.metadata["config_hash"] = ConfigHash(cfg);
  report.metadata["K"] = std::to_string(H.cols());
  return report;
}

bool HasNodeTask(const GroundTruth& truth) {
  const bool background = std::any_of(truth.labels.begin(), truth.labels.end(), [](int l) { return l < 0; });
  const bool inside = std::any_of(truth.labels.begin(), truth.labels.end(), [](int l) { return l >= 0; });
  return background && inside && !truth.communities.empty();
}

std::vector<TaskResult> RunTasks(const Matrix& H, const Dataset& data, const EdgeSplit& split,
                                 const RunConfig& cfg, std::uint64_t seed) {
  TaskOptions opts;
  opts.universe = cfg.mask_universe;
  opts.node_test_fraction = cfg.node_test_fraction;
  const auto task_seed = RunSeeds::From(seed).task;
  std::vector<TaskResult> results;
  if (!split.test_edges.empty()) {
    results.push_back(RunTask(TaskKind::kLinkPrediction, H, data.graph, split, data.truth, task_seed, opts));
  }
  if (HasNodeTask(data.truth)) {
    results.push_back(
        RunTask(TaskKind::kNodeClassification, H, data.graph, split, data.truth, DeriveSeed(task_seed, 1), opts));
  }
  return results;
}

}  // namespace disene
