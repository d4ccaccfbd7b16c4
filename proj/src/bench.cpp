#include "disene/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "disene/experiment.hpp"

namespace disene {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Format(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double Value(const std::optional<MaybeScalar>& v) { return v && v->has_value() ? *v->value : kNaN; }

using RunKey = std::tuple<std::string, std::string, std::size_t, std::uint64_t, std::string>;

}  // namespace

RunConfig MethodConfig(const RunConfig& base, const std::string& dataset, const std::string& method,
                       std::size_t dim) {
  RunConfig cfg = base;
  cfg.dataset = DatasetConfig{DefaultSpec(ParseSynthKind(dataset)), {}, {}, {}};
  cfg.output_dim = dim;
  cfg.background = BackgroundSet::kAllEdges;
  if (method == "disene-fc" || method == "disene-gcn") {
    cfg.encoder = method == "disene-fc" ? EncoderKind::kFc : EncoderKind::kGcn;
    cfg.activation = Activation::kRelu;
  } else if (method == "baseline-sgns") {
    cfg.encoder = EncoderKind::kFc;
    cfg.activation = Activation::kLinear;
    cfg.loss.lambda_dis = 0;
    cfg.loss.lambda_ent = 0;
  } else {
    throw Error("unknown bench method: " + method);
  }
  return cfg;
}

std::vector<BenchRun> BenchManifest(const BenchOptions& options) {
  std::vector<BenchRun> runs;
  for (const auto& dataset : options.datasets) {
    for (const auto& method : options.methods) {
      for (std::size_t dim : options.dims) {
        RunConfig cfg = MethodConfig(options.base, dataset, method, dim);
        const auto hash = ConfigHash(cfg);
        for (std::uint64_t seed : options.seeds) {
          cfg.seeds = {seed};
          runs.push_back({dataset, method, dim, seed, cfg, hash});
        }
      }
    }
  }
  return runs;
}

std::vector<BenchRow> ExecuteBenchRun(const BenchRun& run) {
  const Dataset data = LoadDataset(run.config.dataset);
  const TrainedRun trained = TrainOnSplit(data, run.config, run.seed);
  const Matrix& H = trained.result.H;
  const auto background = BackgroundEdges(data.graph, trained.split, run.config);
  const Explanation explanation = BuildExplanations(H, data.graph, background);
  const MetricsReport report = EvaluateRun(H, data, explanation, run.config, run.seed);
  const auto tasks = RunTasks(H, data, trained.split, run.config, run.seed);

  std::vector<BenchRow> rows;
  auto add = [&](std::string metric, double value) {
    rows.push_back({run.dataset, run.method, run.dim, run.seed, std::move(metric), value, run.config_hash});
  };
  add("comprehensibility", report.comprehensibility_mean.value_or(kNaN));
  add("sparsity", report.sparsity_score);
  add("ovc", Value(report.ovc));
  add("poc", Value(report.poc));
  add("empty_dims", static_cast<double>(report.empty_dims));
  for (const auto& t : tasks) {
    const std::string suffix = t.task == TaskKind::kLinkPrediction ? "link" : "node";
    add("auc_pr_" + suffix, t.auc_pr);
    add("plausibility_" + suffix, t.mean_plausibility.value_or(kNaN));
  }
  add("final_loss", trained.result.trace.back().total);
  return rows;
}

std::vector<BenchRow> ReadBenchCsv(const fs::path& path) {
  std::vector<BenchRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw Error(path.string() + ": malformed row: " + line);
    rows.push_back({f[0], f[1], std::stoull(f[2]), std::stoull(f[3]), f[4], std::strtod(f[5].c_str(), nullptr), f[6]});
  }
  return rows;
}

void AppendBenchRows(const fs::path& path, const std::vector<BenchRow>& rows) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write " + path.string());
  if (fresh) out << "dataset,method,K,seed,metric,value,config_hash\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.method << ',' << r.dim << ',' << r.seed << ',' << r.metric << ','
        << Format(r.value) << ',' << r.config_hash << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

std::map<AggregateKey, Aggregate> AggregateRows(const std::vector<BenchRow>& rows) {
  std::map<AggregateKey, std::vector<double>> values;
  std::map<AggregateKey, std::size_t> missing;
  for (const auto& r : rows) {
    AggregateKey key{r.dataset, r.method, r.dim, r.metric};
    if (std::isnan(r.value)) {
      ++missing[key];
      values[key];
    } else {
      values[key].push_back(r.value);
    }
  }
  std::map<AggregateKey, Aggregate> out;
  for (const auto& [key, v] : values) {
    Aggregate a;
    a.n = v.size();
    a.missing = missing.contains(key) ? missing.at(key) : 0;
    if (a.n > 0) {
      double sum = 0;
      for (double x : v) sum += x;
      a.mean = sum / static_cast<double>(a.n);
      if (a.n > 1) {
        double ss = 0;
        for (double x : v) ss += (x - a.mean) * (x - a.mean);
        a.std = std::sqrt(ss / static_cast<double>(a.n - 1));
      }
    } else {
      a.mean = kNaN;
    }
    out.emplace(key, a);
  }
  return out;
}

std::optional<BestOverK> BestOverDims(const std::map<AggregateKey, Aggregate>& table, const std::string& dataset,
                                      const std::string& method, const std::string& metric) {
  std::optional<BestOverK> best;
  for (const auto& [key, agg] : table) {
    const auto& [d, m, dim, name] = key;
    if (d != dataset || m != method || name != metric || agg.n == 0) continue;
    if (!best || agg.mean > best->value.mean) best = BestOverK{dim, agg};
  }
  return best;
}

void WriteBenchTables(const std::vector<BenchRow>& rows, const fs::path& out) {
  fs::create_directories(out);
  const auto table = AggregateRows(rows);
  std::vector<std::string> datasets, methods;
  for (const auto& r : rows) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }

  Json summary = Json::object();
  {
    std::ofstream best_k(out / "plausibility_best_k.csv");
    if (!best_k) throw Error("cannot write plausibility_best_k.csv");
    best_k << "method,dataset,task,best_K,mean,std,n\n";
    for (const auto& method : methods) {
      for (const auto& dataset : datasets) {
        for (const char* task : {"link", "node"}) {
          const auto best = BestOverDims(table, dataset, method, std::string("plausibility_") + task);
          if (!best) continue;
          best_k << method << ',' << dataset << ',' << task << ',' << best->dim << ',' << Format(best->value.mean)
             << ',' << Format(best->value.std) << ',' << best->value.n << '\n';
          summary["plausibility"][method][dataset][task] = {
              {"best_K", best->dim}, {"mean", best->value.mean}, {"std", best->value.std}};
        }
      }
    }
  }
  {
    std::ofstream mk(out / "metrics_by_k.csv");
    if (!mk) throw Error("cannot write metrics_by_k.csv");
    mk << "dataset,method,K,metric,mean,std,n,missing\n";
    for (const auto& [key, agg] : table) {
      const auto& [dataset, method, dim, metric] = key;
      mk << dataset << ',' << method << ',' << dim << ',' << metric << ',' << Format(agg.mean) << ','
         << Format(agg.std) << ',' << agg.n << ',' << agg.missing << '\n';
    }
  }
  WriteJson(summary, out / "bench_summary.json");
}

BenchSummary RunBench(const BenchOptions& options, std::ostream* log) {
  const auto manifest = BenchManifest(options);
  const fs::path csv = options.out / kBenchCsv;
  fs::create_directories(options.out);

  std::set<RunKey> done;
  for (const auto& r : ReadBenchCsv(csv)) {
    if (r.metric == "final_loss") done.insert({r.dataset, r.method, r.dim, r.seed, r.config_hash});
  }
  std::vector<const BenchRun*> todo;
  BenchSummary summary;
  summary.planned = manifest.size();
  for (const auto& run : manifest) {
    if (done.contains({run.dataset, run.method, run.dim, run.seed, run.config_hash})) {
      ++summary.skipped;
    } else {
      todo.push_back(&run);
    }
  }

  std::mutex io;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
      const BenchRun& run = *todo[i];
      std::string status;
      std::vector<BenchRow> rows;
      bool ok = true;
      try {
        rows = ExecuteBenchRun(run);
      } catch (const std::exception& e) {
        ok = false;
        status = e.what();
      }
      std::lock_guard lock(io);
      if (ok) {
        AppendBenchRows(csv, rows);
        ++summary.completed;
      } else {
        ++summary.failed;
      }
      if (log) {
        *log << "[" << (summary.completed + summary.failed) << "/" << todo.size() << "] " << run.dataset << ' '
             << run.method << " K=" << run.dim << " seed=" << run.seed << (ok ? " ok" : " FAILED: " + status)
             << std::endl;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = std::max(1, options.workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  summary.rows = ReadBenchCsv(csv);
  WriteBenchTables(summary.rows, options.out);
  return summary;
}

}  // namespace disene
