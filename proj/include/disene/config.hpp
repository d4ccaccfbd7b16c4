#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "disene/downstream.hpp"
#include "disene/io.hpp"
#include "disene/synth.hpp"
#include "disene/training.hpp"

namespace disene {

// Either a synthetic generator spec or edge-list / label / ground-truth files.
struct DatasetConfig {
  std::optional<SynthSpec> synthetic;
  std::filesystem::path edges;
  std::filesystem::path labels;        // optional
  std::filesystem::path ground_truth;  // optional, JSON of edge index lists
};

enum class BackgroundSet { kTrainEdges, kAllEdges };

struct RunConfig {
  DatasetConfig dataset;
  EncoderKind encoder = EncoderKind::kFc;
  Activation activation = Activation::kRelu;
  std::size_t hidden_dim = 128;
  std::size_t output_dim = 32;
  WalkConfig walk;  // seed field ignored; derived from the run seed
  LossConfig loss;  // seed field ignored; derived from the run seed
  std::vector<std::uint64_t> seeds{0};
  double test_fraction = 0.1;  // 0 trains on the full graph
  BackgroundSet background = BackgroundSet::kTrainEdges;
  bool ovc = true;
  bool poc = true;
  std::size_t num_permutations = 100;
  MaskUniverse mask_universe = MaskUniverse::kAllInstances;
  double node_test_fraction = 0.2;
  std::filesystem::path out = "out";
  int threads = 1;
  bool deterministic = false;
};

void Validate(const RunConfig& cfg);

// "baseline-sgns" when both regularizers are off, else "disene-<encoder>".
std::string MethodLabel(const RunConfig& cfg);

// Full resolved config. Keys match the file schema accepted by FromJson.
Json ToJson(const RunConfig& cfg);
// Applies the keys present in `doc` on top of `base`; unknown keys throw.
RunConfig FromJson(const Json& doc, RunConfig base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path, RunConfig base = {});

// FNV-1a 64 over the canonical dump of the config without seeds, output
// directory and thread count. Rendered as 16 hex digits.
std::string ConfigHash(const RunConfig& cfg);

// Per-run seed streams.
struct RunSeeds {
  std::uint64_t walk, init, split, task, permutation;
  static RunSeeds From(std::uint64_t seed);
};

}  // namespace disene
