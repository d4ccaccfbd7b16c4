#include "disene/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "disene/bench.hpp"
#include "disene/experiment.hpp"

namespace disene {

namespace fs = std::filesystem;

namespace {

// Values given on the command line; unset fields leave the config alone.
struct Flags {
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> out, config;
  std::optional<int> threads;
  bool deterministic = false;

  std::optional<std::string> kind, edges, labels, ground_truth;
  std::optional<std::uint64_t> data_seed;

  std::optional<std::string> encoder, activation;
  std::optional<std::size_t> hidden_dim, dim, epochs, batch_size, walk_length, num_walks, window, negatives;
  std::optional<double> lr, lambda_dis, lambda_ent, test_fraction;

  std::optional<std::string> background, universe;
  bool no_ovc = false, no_poc = false;
  std::optional<std::size_t> permutations;
};

template <typename T>
CLI::Option* Opt(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
  return app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

const std::vector<std::string> kKinds{"ring", "sbm", "ba", "er", "ring_cliques", "sbm_cliques", "ba_cliques", "er_cliques"};

void AddDatasetFlags(CLI::App* app, Flags& f) {
  Opt(app, "--kind", f.kind, "synthetic dataset kind")->check(CLI::IsMember(kKinds));
  Opt(app, "--data-seed", f.data_seed, "seed of the synthetic generator");
  Opt(app, "--edges", f.edges, "edge-list file");
  Opt(app, "--labels", f.labels, "label file (node label per line)");
  Opt(app, "--ground-truth", f.ground_truth, "ground-truth JSON (communities as edge index lists)");
}

void AddTrainFlags(CLI::App* app, Flags& f) {
  Opt(app, "--encoder", f.encoder, "fc or gcn")->check(CLI::IsMember({"fc", "gcn"}));
  Opt(app, "--activation", f.activation, "relu, softplus or linear")
      ->check(CLI::IsMember({"relu", "softplus", "linear"}));
  Opt(app, "--hidden-dim", f.hidden_dim, "hidden width D");
  Opt(app, "--dim", f.dim, "embedding dimension K");
  Opt(app, "--epochs", f.epochs, "optimization epochs");
  Opt(app, "--lr", f.lr, "Adam learning rate");
  Opt(app, "--lambda-dis", f.lambda_dis, "weight of the disentanglement loss");
  Opt(app, "--lambda-ent", f.lambda_ent, "weight of the entropy regularizer");
  Opt(app, "--batch-size", f.batch_size, "positive pairs per step (0 = full corpus)");
  Opt(app, "--walk-length", f.walk_length, "random-walk length");
  Opt(app, "--num-walks", f.num_walks, "walks per node");
  Opt(app, "--window", f.window, "skip-gram window");
  Opt(app, "--negatives", f.negatives, "negatives per positive pair");
  Opt(app, "--test-fraction", f.test_fraction, "held-out edge fraction (0 = train on all edges)");
}

void AddMetricFlags(CLI::App* app, Flags& f) {
  Opt(app, "--background", f.background, "explanation background: train or all")
      ->check(CLI::IsMember({"train", "all"}));
  app->add_flag("--no-ovc", f.no_ovc, "skip overlap consistency");
  app->add_flag("--no-poc", f.no_poc, "skip positional coherence");
  Opt(app, "--permutations", f.permutations, "permutations for positional coherence");
  Opt(app, "--mask-universe", f.universe, "task-mask instances: all or qualifying")
      ->check(CLI::IsMember({"all", "qualifying"}));
}

// Layers: base, then the --config file, then command-line flags.
RunConfig Resolve(RunConfig cfg, const Flags& f) {
  if (f.config) cfg = LoadRunConfig(*f.config, std::move(cfg));
  if (f.kind) {
    SynthSpec spec = DefaultSpec(ParseSynthKind(*f.kind));
    if (f.data_seed) spec.seed = *f.data_seed;
    cfg.dataset = DatasetConfig{spec, {}, {}, {}};
  } else if (f.data_seed) {
    if (!cfg.dataset.synthetic) throw Error("--data-seed needs a synthetic dataset");
    cfg.dataset.synthetic->seed = *f.data_seed;
  }
  if (f.edges) {
    if (f.kind) throw Error("--kind and --edges are mutually exclusive");
    cfg.dataset = DatasetConfig{std::nullopt, *f.edges, {}, {}};
  }
  if (f.labels || f.ground_truth) {
    if (cfg.dataset.synthetic) throw Error("--labels/--ground-truth need an edge-list dataset");
    if (f.labels) cfg.dataset.labels = *f.labels;
    if (f.ground_truth) cfg.dataset.ground_truth = *f.ground_truth;
  }
  if (f.encoder) cfg.encoder = ParseEncoderKind(*f.encoder);
  if (f.activation) cfg.activation = ParseActivation(*f.activation);
  if (f.hidden_dim) cfg.hidden_dim = *f.hidden_dim;
  if (f.dim) cfg.output_dim = *f.dim;
  if (f.epochs) cfg.loss.epochs = *f.epochs;
  if (f.lr) cfg.loss.learning_rate = *f.lr;
  if (f.lambda_dis) cfg.loss.lambda_dis = *f.lambda_dis;
  if (f.lambda_ent) cfg.loss.lambda_ent = *f.lambda_ent;
  if (f.batch_size) cfg.loss.batch_size = *f.batch_size;
  if (f.walk_length) cfg.walk.walk_length = *f.walk_length;
  if (f.num_walks) cfg.walk.num_walks = *f.num_walks;
  if (f.window) cfg.walk.window = *f.window;
  if (f.negatives) cfg.walk.negatives_per_positive = *f.negatives;
  if (f.test_fraction) cfg.test_fraction = *f.test_fraction;
  if (f.background) cfg.background = *f.background == "train" ? BackgroundSet::kTrainEdges : BackgroundSet::kAllEdges;
  if (f.universe) {
    cfg.mask_universe = *f.universe == "all" ? MaskUniverse::kAllInstances : MaskUniverse::kQualifyingInstances;
  }
  if (f.no_ovc) cfg.ovc = false;
  if (f.no_poc) cfg.poc = false;
  if (f.permutations) cfg.num_permutations = *f.permutations;
  if (f.seeds) cfg.seeds = *f.seeds;
  if (f.out) cfg.out = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.deterministic) cfg.deterministic = true;
  Validate(cfg);
  return cfg;
}

struct LoadedCheckpoint {
  fs::path dir;
  Matrix H;
  RunConfig config;
  std::uint64_t seed = 0;
};

// The sidecar config is the base; seeds come from the sidecar, not flags.
LoadedCheckpoint LoadCheckpointRun(const fs::path& dir, const Flags& flags) {
  auto ckpt = ReadCheckpoint(dir);
  LoadedCheckpoint out;
  out.dir = dir;
  out.H = std::move(ckpt.H);
  out.seed = ckpt.sidecar.at("seed").get<std::uint64_t>();
  Flags f = flags;
  f.seeds.reset();
  out.config = Resolve(FromJson(ckpt.sidecar.at("config")), f);
  out.config.seeds = {out.seed};
  if (!flags.out) out.config.out = dir;
  if (static_cast<std::size_t>(out.H.cols()) != out.config.output_dim) {
    throw Error("checkpoint " + dir.string() + " has K = " + std::to_string(out.H.cols()) +
                " but the config asks for K = " + std::to_string(out.config.output_dim));
  }
  return out;
}

// Datasets are cached by their resolved JSON so multi-checkpoint commands
// load each graph once.
class DatasetCache {
 public:
  const Dataset& Get(const DatasetConfig& cfg, const Json& key) {
    auto k = key.dump();
    auto it = cache_.find(k);
    if (it == cache_.end()) it = cache_.emplace(k, LoadDataset(cfg)).first;
    return it->second;
  }

 private:
  std::map<std::string, Dataset> cache_;
};

const Dataset& DatasetFor(DatasetCache& cache, const LoadedCheckpoint& run) {
  const Dataset& data = cache.Get(run.config.dataset, ToJson(run.config)["dataset"]);
  if (static_cast<std::size_t>(run.H.rows()) != data.graph.num_nodes()) {
    throw Error("checkpoint " + run.dir.string() + " has " + std::to_string(run.H.rows()) +
                " rows but the graph has " + std::to_string(data.graph.num_nodes()) + " nodes");
  }
  return data;
}

std::string Indexed(const std::string& stem, std::size_t i, std::size_t n, const std::string& ext) {
  return n == 1 ? stem + ext : stem + "_" + std::to_string(i) + ext;
}

std::string Num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::pair<double, double> MeanStd(const std::vector<double>& v) {
  std::vector<double> x;
  for (double a : v) {
    if (!std::isnan(a)) x.push_back(a);
  }
  if (x.empty()) return {std::nan(""), std::nan("")};
  double mean = 0;
  for (double a : x) mean += a;
  mean /= static_cast<double>(x.size());
  double ss = 0;
  for (double a : x) ss += (a - mean) * (a - mean);
  return {mean, x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0};
}

int CmdGen(const Flags& f, const std::map<std::string, double>& synth, std::ostream& out) {
  RunConfig cfg = f.config ? LoadRunConfig(*f.config) : RunConfig{};
  SynthSpec spec;
  if (f.kind) {
    spec = DefaultSpec(ParseSynthKind(*f.kind));
  } else if (cfg.dataset.synthetic) {
    spec = *cfg.dataset.synthetic;
  } else {
    throw Error("gen needs --kind");
  }
  if (f.seeds) spec.seed = f.seeds->front();
  if (f.data_seed) spec.seed = *f.data_seed;
  auto count = [&](const char* key, std::size_t& target) {
    if (auto it = synth.find(key); it != synth.end()) target = static_cast<std::size_t>(it->second);
  };
  count("num_cliques", spec.num_cliques);
  count("clique_size", spec.clique_size);
  count("base_nodes", spec.base_nodes);
  count("attach", spec.attach_edges_per_clique);
  count("ba_m", spec.ba_m);
  count("noise_edges", spec.noise_edges);
  if (auto it = synth.find("er_p"); it != synth.end()) spec.er_p = it->second;
  if (auto it = synth.find("sbm_p_out"); it != synth.end()) spec.sbm_p_out = it->second;
  Validate(spec);

  const auto data = GenerateSynthetic(spec);
  const fs::path dir = f.out ? fs::path(*f.out) : fs::path(".");
  fs::create_directories(dir);
  const std::string stem(ToString(spec.kind));
  const auto edges = dir / (stem + ".edges"), labels = dir / (stem + ".labels"), gt = dir / (stem + ".gt.json");
  WriteEdgeList(data.graph, edges);
  WriteLabels(data.graph, data.truth.labels, labels);
  WriteGroundTruthJson(data.truth, data.graph.num_edges(), gt);
  out << stem << ": " << data.graph.num_nodes() << " nodes, " << data.graph.num_edges() << " edges, "
      << data.truth.communities.size() << " communities\n"
      << edges.string() << '\n'
      << labels.string() << '\n'
      << gt.string() << '\n';
  return 0;
}

int CmdTrain(const Flags& f, std::ostream& out) {
  const RunConfig cfg = Resolve(RunConfig{}, f);
  const Dataset data = LoadDataset(cfg.dataset);
  for (std::uint64_t seed : cfg.seeds) {
    const auto run = TrainOnSplit(data, cfg, seed);
    const fs::path dir = cfg.seeds.size() == 1 ? cfg.out : cfg.out / ("seed_" + std::to_string(seed));
    WriteCheckpoint(dir, run.result.H, CheckpointSidecar(cfg, seed, data, run.result));
    out << MethodLabel(cfg) << " seed=" << seed << " config=" << ConfigHash(cfg)
        << " loss=" << Num(run.result.trace.back().total) << " -> " << dir.string() << '\n';
  }
  return 0;
}

int CmdExplain(const Flags& f, const std::string& checkpoint, bool triplets, std::ostream& out) {
  const auto run = LoadCheckpointRun(checkpoint, f);
  DatasetCache cache;
  const Dataset& data = DatasetFor(cache, run);
  const auto split = SplitForRun(data.graph, run.config, run.seed);
  const auto explanation = BuildExplanations(run.H, data.graph, BackgroundEdges(data.graph, split, run.config));
  WriteExplanationJson(explanation, run.config.out / "explanation.json");
  if (triplets) WriteExplanationTriplets(explanation, data.graph, run.config.out / "explanation_triplets.csv");
  out << "K=" << explanation.dims.size() << " empty_dims=" << explanation.num_empty() << " -> "
      << (run.config.out / "explanation.json").string() << '\n';
  return 0;
}

int CmdEvaluate(const Flags& f, const std::vector<std::string>& checkpoints, std::ostream& out) {
  DatasetCache cache;
  std::vector<LoadedCheckpoint> runs;
  for (const auto& c : checkpoints) runs.push_back(LoadCheckpointRun(c, f));
  fs::path dir = f.out ? fs::path(*f.out) : runs.size() == 1 ? runs[0].dir : runs[0].dir.parent_path();
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);

  std::vector<std::string> columns{"comprehensibility", "sparsity"};
  if (runs[0].config.ovc) columns.push_back("ovc");
  if (runs[0].config.poc) columns.push_back("poc");
  columns.push_back("empty_dims");

  std::map<std::string, std::vector<double>> values;
  std::ofstream rows(dir / "metrics_runs.csv");
  if (!rows) throw Error("cannot write " + (dir / "metrics_runs.csv").string());
  rows << "checkpoint,seed,config_hash";
  for (const auto& c : columns) rows << ',' << c;
  rows << '\n';
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    if (run.config.ovc != runs[0].config.ovc || run.config.poc != runs[0].config.poc) {
      throw Error("checkpoints disagree on metric toggles");
    }
    const Dataset& data = DatasetFor(cache, run);
    const auto split = SplitForRun(data.graph, run.config, run.seed);
    const auto explanation = BuildExplanations(run.H, data.graph, BackgroundEdges(data.graph, split, run.config));
    const auto report = EvaluateRun(run.H, data, explanation, run.config, run.seed);
    WriteJson(ToJson(report), dir / Indexed("metrics", i, runs.size(), ".json"));
    std::map<std::string, double> v{
        {"comprehensibility", report.comprehensibility_mean.value_or(std::nan(""))},
        {"sparsity", report.sparsity_score},
        {"empty_dims", static_cast<double>(report.empty_dims)}};
    if (report.ovc) v["ovc"] = report.ovc->value.value_or(std::nan(""));
    if (report.poc) v["poc"] = report.poc->value.value_or(std::nan(""));
    rows << run.dir.string() << ',' << run.seed << ',' << ConfigHash(run.config);
    for (const auto& c : columns) {
      rows << ',' << Num(v.at(c));
      values[c].push_back(v.at(c));
    }
    rows << '\n';
  }

  std::ofstream summary(dir / "metrics_summary.csv");
  if (!summary) throw Error("cannot write " + (dir / "metrics_summary.csv").string());
  summary << "stat";
  for (const auto& c : columns) summary << ',' << c;
  summary << "\nmean";
  std::vector<std::pair<double, double>> stats;
  for (const auto& c : columns) stats.push_back(MeanStd(values[c]));
  for (const auto& s : stats) summary << ',' << Num(s.first);
  summary << "\nstd";
  for (const auto& s : stats) summary << ',' << Num(s.second);
  summary << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << columns[c] << ": " << Num(stats[c].first) << " ± " << Num(stats[c].second) << '\n';
  }
  return 0;
}

int CmdDownstream(const Flags& f, const std::vector<std::string>& checkpoints, std::ostream& out) {
  DatasetCache cache;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const auto run = LoadCheckpointRun(checkpoints[i], f);
    const Dataset& data = DatasetFor(cache, run);
    const auto split = SplitForRun(data.graph, run.config, run.seed);
    const auto tasks = RunTasks(run.H, data, split, run.config, run.seed);
    if (tasks.empty()) {
      throw Error("no downstream task is defined: the checkpoint has no held-out edges and the ground truth "
                  "has no background nodes");
    }
    const fs::path dir = f.out ? fs::path(*f.out) : run.dir;
    Json summary = Json::array();
    for (const auto& t : tasks) {
      const std::string name(ToString(t.task));
      WriteInstanceCsv(t, data.graph, dir / Indexed("plausibility_" + name, i, checkpoints.size(), ".csv"));
      Json j = ToJson(t);
      j["seed"] = run.seed;
      j["config_hash"] = ConfigHash(run.config);
      summary.push_back(j);
      out << run.dir.string() << ' ' << name << ": auc_pr=" << Num(t.auc_pr)
          << " plausibility=" << Num(t.mean_plausibility.value_or(std::nan(""))) << " (" << t.evaluated
          << " instances, " << t.skipped << " skipped)\n";
    }
    WriteJson(summary, dir / Indexed("tasks", i, checkpoints.size(), ".json"));
  }
  return 0;
}

int CmdBench(const Flags& f, BenchOptions options, bool list_only, std::ostream& out, std::ostream& err) {
  RunConfig base;
  base.seeds = options.seeds;
  base.out = "bench";
  base.dataset.synthetic = DefaultSpec(SynthKind::kRingCliques);  // replaced per run
  options.base = Resolve(base, f);
  options.seeds = options.base.seeds;
  options.out = options.base.out;
  options.workers = options.base.threads;
  options.base.threads = 1;
  const auto manifest = BenchManifest(options);
  if (list_only) {
    out << manifest.size() << " runs\n";
    for (const auto& r : manifest) {
      out << r.dataset << ',' << r.method << ',' << r.dim << ',' << r.seed << ',' << r.config_hash << '\n';
    }
    return 0;
  }
  const auto summary = RunBench(options, &err);
  out << "planned " << summary.planned << ", skipped " << summary.skipped << ", completed " << summary.completed
      << ", failed " << summary.failed << '\n';
  std::ifstream table(options.out / "plausibility_best_k.csv");
  out << table.rdbuf();
  return summary.failed == 0 ? 0 : 1;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disentangled, self-explainable node embeddings"};
  app.require_subcommand(1);
  Flags f;
  Opt(&app, "--seed", f.seeds, "run seed(s)")->expected(1, -1);
  Opt(&app, "--out", f.out, "output directory");
  Opt(&app, "--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  Opt(&app, "--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", f.deterministic, "single-threaded, bit-reproducible runs");

  auto* gen = app.add_subcommand("gen", "generate a synthetic benchmark graph");
  Opt(gen, "--kind", f.kind, "ring, sbm, ba or er")->check(CLI::IsMember(kKinds));
  Opt(gen, "--data-seed", f.data_seed, "generator seed (defaults to --seed)");
  std::map<std::string, double> synth;
  for (const char* name : {"num_cliques", "clique_size", "base_nodes", "attach", "ba_m", "noise_edges", "er_p",
                           "sbm_p_out"}) {
    std::string flag = std::string("--") + name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    gen->add_option_function<double>(flag, [&synth, name](double v) { synth[name] = v; }, name);
  }

  auto* train = app.add_subcommand("train", "train an embedding and write a checkpoint");
  AddDatasetFlags(train, f);
  AddTrainFlags(train, f);

  std::string checkpoint;
  bool triplets = false;
  auto* explain = app.add_subcommand("explain", "dump per-dimension explanation subgraphs");
  explain->add_option("--checkpoint", checkpoint, "checkpoint directory")->required()->check(CLI::ExistingDirectory);
  explain->add_flag("--triplets", triplets, "also write u,v,weight,dim CSV");
  AddDatasetFlags(explain, f);
  AddMetricFlags(explain, f);
  Opt(explain, "--dim", f.dim, "expected K");

  std::vector<std::string> checkpoints;
  auto* evaluate = app.add_subcommand("evaluate", "explainability metrics over one or more checkpoints");
  evaluate->add_option("--checkpoint", checkpoints, "checkpoint directories")
      ->required()
      ->expected(1, -1)
      ->check(CLI::ExistingDirectory);
  AddDatasetFlags(evaluate, f);
  AddMetricFlags(evaluate, f);
  Opt(evaluate, "--dim", f.dim, "expected K");

  auto* downstream = app.add_subcommand("downstream", "link prediction / node classification with plausibility");
  downstream->add_option("--checkpoint", checkpoints, "checkpoint directories")
      ->required()
      ->expected(1, -1)
      ->check(CLI::ExistingDirectory);
  AddDatasetFlags(downstream, f);
  AddMetricFlags(downstream, f);
  Opt(downstream, "--dim", f.dim, "expected K");

  BenchOptions bench_opts;
  bool list_only = false;
  auto* bench = app.add_subcommand("bench", "run the synthetic benchmark suite");
  bench->add_option("--datasets", bench_opts.datasets, "datasets")->check(CLI::IsMember({"ring", "sbm", "ba", "er"}));
  bench->add_option("--methods", bench_opts.methods, "methods")
      ->check(CLI::IsMember({"disene-fc", "disene-gcn", "baseline-sgns"}));
  bench->add_option("--dims", bench_opts.dims, "K values");
  bench->add_flag("--list", list_only, "print the run manifest and exit");
  AddTrainFlags(bench, f);
  AddMetricFlags(bench, f);

  for (auto* sub : {gen, train, explain, evaluate, downstream, bench}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (*gen) return CmdGen(f, synth, out);
    if (*train) return CmdTrain(f, out);
    if (*explain) return CmdExplain(f, checkpoint, triplets, out);
    if (*evaluate) return CmdEvaluate(f, checkpoints, out);
    if (*downstream) return CmdDownstream(f, checkpoints, out);
    if (*bench) return CmdBench(f, bench_opts, list_only, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace disene
