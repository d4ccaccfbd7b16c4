#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "disene/config.hpp"

namespace disene {

struct BenchOptions {
  RunConfig base;  // walk/loss/metric settings shared by every run
  std::vector<std::string> datasets{"ring", "sbm", "ba", "er"};
  std::vector<std::string> methods{"disene-fc", "disene-gcn", "baseline-sgns"};
  std::vector<std::size_t> dims{2, 4, 8, 16, 32, 64, 128};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::filesystem::path out = "bench";
  int workers = 1;
};

struct BenchRun {
  std::string dataset;
  std::string method;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  RunConfig config;
  std::string config_hash;
};

// disene-fc / disene-gcn: relu encoder with both regularizers at their base
// values. baseline-sgns: fc encoder, linear activation, both weights 0.
// Explanations use every edge as background.
RunConfig MethodConfig(const RunConfig& base, const std::string& dataset, const std::string& method, std::size_t dim);

// dataset-major order: dataset, method, K, seed.
std::vector<BenchRun> BenchManifest(const BenchOptions& options);

struct BenchRow {
  std::string dataset;
  std::string method;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0;  // NaN when the metric is undefined for the run
  std::string config_hash;
};

// Trains and evaluates one run; metric rows end with "final_loss", which
// marks the run complete in the long CSV.
std::vector<BenchRow> ExecuteBenchRun(const BenchRun& run);

inline constexpr const char* kBenchCsv = "bench_long.csv";

std::vector<BenchRow> ReadBenchCsv(const std::filesystem::path& path);
void AppendBenchRows(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

struct Aggregate {
  double mean = 0;
  double std = 0;  // sample standard deviation, 0 for one value
  std::size_t n = 0;       // defined values
  std::size_t missing = 0; // undefined (NaN) values
};

using AggregateKey = std::tuple<std::string, std::string, std::size_t, std::string>;  // dataset, method, K, metric
std::map<AggregateKey, Aggregate> AggregateRows(const std::vector<BenchRow>& rows);

struct BestOverK {
  std::size_t dim = 0;
  Aggregate value;
};
// Highest seed-mean of `metric` across K for one (dataset, method).
std::optional<BestOverK> BestOverDims(const std::map<AggregateKey, Aggregate>& table, const std::string& dataset,
                                      const std::string& method, const std::string& metric);

// bench_long.csv is appended run by run; plausibility_best_k.csv,
// metrics_by_k.csv and bench_summary.json are rebuilt from it at the end.
struct BenchSummary {
  std::size_t planned = 0;
  std::size_t skipped = 0;  // already present in the long CSV
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::vector<BenchRow> rows;  // every row of the long CSV after the run
};
BenchSummary RunBench(const BenchOptions& options, std::ostream* log = nullptr);

void WriteBenchTables(const std::vector<BenchRow>& rows, const std::filesystem::path& out);

}  // namespace disene
