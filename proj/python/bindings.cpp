#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "disene/cli.hpp"
#include "disene/experiment.hpp"
#include "disene/io.hpp"
#include "disene/synth.hpp"

namespace py = pybind11;
using namespace disene;

namespace {

// Configs cross the boundary as JSON text; the Python wrapper converts dicts.
RunConfig ParseConfig(const std::string& text) {
  RunConfig cfg = FromJson(Json::parse(text));
  Validate(cfg);
  return cfg;
}

Explanation ExplainRun(const Matrix& H, const Dataset& data, const RunConfig& cfg, std::uint64_t seed) {
  if (static_cast<std::size_t>(H.rows()) != data.graph.num_nodes()) {
    throw Error("embedding has " + std::to_string(H.rows()) + " rows, graph has " +
                std::to_string(data.graph.num_nodes()) + " nodes");
  }
  const auto split = SplitForRun(data.graph, cfg, seed);
  return BuildExplanations(H, data.graph, BackgroundEdges(data.graph, split, cfg));
}

py::dict Generate(const std::string& kind, std::uint64_t seed) {
  SynthSpec spec = DefaultSpec(ParseSynthKind(kind));
  spec.seed = seed;
  const auto data = GenerateSynthetic(spec);
  const Graph& g = data.graph;
  py::array_t<std::uint32_t> edges({static_cast<py::ssize_t>(g.num_edges()), py::ssize_t{2}});
  auto e = edges.mutable_unchecked<2>();
  for (EdgeId i = 0; i < g.num_edges(); ++i) {
    e(i, 0) = g.edge(i).u;
    e(i, 1) = g.edge(i).v;
  }
  std::vector<std::vector<std::uint32_t>> communities;
  for (const auto& c : data.truth.communities) communities.push_back(c.edges);
  py::dict out;
  out["num_nodes"] = g.num_nodes();
  out["edges"] = edges;
  out["labels"] = data.truth.labels;
  out["communities"] = communities;
  return out;
}

py::tuple TrainRun(const std::string& config, std::uint64_t seed) {
  const RunConfig cfg = ParseConfig(config);
  const Dataset data = LoadDataset(cfg.dataset);
  TrainedRun run;
  {
    py::gil_scoped_release release;
    run = TrainOnSplit(data, cfg, seed);
  }
  return py::make_tuple(run.result.H, CheckpointSidecar(cfg, seed, data, run.result).dump());
}

std::string ExplainJson(const Matrix& H, const std::string& config, std::uint64_t seed) {
  const RunConfig cfg = ParseConfig(config);
  const Dataset data = LoadDataset(cfg.dataset);
  return ExplanationToJson(ExplainRun(H, data, cfg, seed)).dump();
}

std::string EvaluateJson(const Matrix& H, const std::string& config, std::uint64_t seed) {
  const RunConfig cfg = ParseConfig(config);
  const Dataset data = LoadDataset(cfg.dataset);
  py::gil_scoped_release release;
  const auto explanation = ExplainRun(H, data, cfg, seed);
  return ToJson(EvaluateRun(H, data, explanation, cfg, seed)).dump();
}

std::string DownstreamJson(const Matrix& H, const std::string& config, std::uint64_t seed) {
  const RunConfig cfg = ParseConfig(config);
  const Dataset data = LoadDataset(cfg.dataset);
  py::gil_scoped_release release;
  Json out = Json::array();
  for (const auto& t : RunTasks(H, data, SplitForRun(data.graph, cfg, seed), cfg, seed)) out.push_back(ToJson(t));
  return out.dump();
}

py::tuple Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "disene");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Disentangled self-explainable node embeddings";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("generate", &Generate, py::arg("kind"), py::arg("seed") = 1);
  m.def("default_config", [] {
    RunConfig cfg;
    cfg.dataset.synthetic = DefaultSpec(SynthKind::kRingCliques);
    return ToJson(cfg).dump();
  });
  m.def("config_hash", [](const std::string& config) { return ConfigHash(ParseConfig(config)); });
  m.def("train", &TrainRun, py::arg("config"), py::arg("seed") = 0);
  m.def("explain", &ExplainJson, py::arg("H"), py::arg("config"), py::arg("seed") = 0);
  m.def("evaluate", &EvaluateJson, py::arg("H"), py::arg("config"), py::arg("seed") = 0);
  m.def("downstream", &DownstreamJson, py::arg("H"), py::arg("config"), py::arg("seed") = 0);

  m.def("auc_pr", [](std::vector<double> scores, std::vector<int> labels) { return AucPr(scores, labels); });
  m.def("jaccard", [](std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return Jaccard(a, b);
  });
  m.def("pearson", [](std::vector<double> x, std::vector<double> y) -> std::optional<double> {
    if (x.size() != y.size()) throw Error("pearson: length mismatch");
    return Pearson(x, y).value;
  });
  m.def("run_cli", &Cli, py::arg("args"));
}
