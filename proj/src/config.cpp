#include "disene/config.hpp"

#include <cstdio>
#include <set>

namespace disene {

namespace {

void RejectUnknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error("config: \"" + where + "\" must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw Error("config: unknown key \"" + where + (where.empty() ? "" : ".") + key + "\"");
  }
}

template <typename T>
void Take(const Json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(std::string("config: bad value for \"") + key + "\": " + e.what());
  }
}

std::string_view ToString(NegativeDistribution d) {
  return d == NegativeDistribution::kUniform ? "uniform" : "degree";
}

NegativeDistribution ParseNegativeDistribution(std::string_view s) {
  if (s == "uniform") return NegativeDistribution::kUniform;
  if (s == "degree") return NegativeDistribution::kDegreeBiased;
  throw Error("unknown negative distribution: " + std::string(s));
}

std::string_view ToString(BackgroundSet b) { return b == BackgroundSet::kTrainEdges ? "train" : "all"; }

BackgroundSet ParseBackground(std::string_view s) {
  if (s == "train") return BackgroundSet::kTrainEdges;
  if (s == "all") return BackgroundSet::kAllEdges;
  throw Error("unknown background set: " + std::string(s));
}

std::string_view ToString(MaskUniverse u) { return u == MaskUniverse::kAllInstances ? "all" : "qualifying"; }

MaskUniverse ParseUniverse(std::string_view s) {
  if (s == "all") return MaskUniverse::kAllInstances;
  if (s == "qualifying") return MaskUniverse::kQualifyingInstances;
  throw Error("unknown mask universe: " + std::string(s));
}

Json SynthToJson(const SynthSpec& s) {
  return Json{{"kind", std::string(ToString(s.kind))},
              {"num_cliques", s.num_cliques},
              {"clique_size", s.clique_size},
              {"base_nodes", s.base_nodes},
              {"attach_edges_per_clique", s.attach_edges_per_clique},
              {"er_p", s.er_p},
              {"sbm_p_out", s.sbm_p_out},
              {"ba_m", s.ba_m},
              {"noise_edges", s.noise_edges},
              {"seed", s.seed}};
}

}  // namespace

void Validate(const RunConfig& cfg) {
  if (cfg.dataset.synthetic) {
    Validate(*cfg.dataset.synthetic);
  } else if (cfg.dataset.edges.empty()) {
    throw Error("config: dataset needs a synthetic kind or an edge file");
  }
  if (cfg.hidden_dim < 1 || cfg.output_dim < 1) throw Error("config: hidden_dim and output_dim must be >= 1");
  Validate(cfg.walk);
  Validate(cfg.loss);
  if (cfg.seeds.empty()) throw Error("config: seeds must not be empty");
  if (!(cfg.test_fraction >= 0 && cfg.test_fraction < 1)) throw Error("config: test_fraction must be in [0, 1)");
  if (!(cfg.node_test_fraction > 0 && cfg.node_test_fraction < 1)) {
    throw Error("config: node_test_fraction must be in (0, 1)");
  }
  if (cfg.num_permutations < 1) throw Error("config: num_permutations must be >= 1");
  if (cfg.threads < 1) throw Error("config: threads must be >= 1");
}

std::string MethodLabel(const RunConfig& cfg) {
  if (cfg.loss.lambda_dis == 0 && cfg.loss.lambda_ent == 0) return "baseline-sgns";
  return "disene-" + std::string(ToString(cfg.encoder));
}

Json ToJson(const RunConfig& cfg) {
  Json dataset;
  if (cfg.dataset.synthetic) {
    dataset = SynthToJson(*cfg.dataset.synthetic);
  } else {
    dataset = Json{{"edges", cfg.dataset.edges.string()}};
    if (!cfg.dataset.labels.empty()) dataset["labels"] = cfg.dataset.labels.string();
    if (!cfg.dataset.ground_truth.empty()) dataset["ground_truth"] = cfg.dataset.ground_truth.string();
  }
  return Json{
      {"dataset", dataset},
      {"encoder", std::string(ToString(cfg.encoder))},
      {"activation", std::string(ToString(cfg.activation))},
      {"hidden_dim", cfg.hidden_dim},
      {"output_dim", cfg.output_dim},
      {"walk",
       {{"walk_length", cfg.walk.walk_length},
        {"num_walks", cfg.walk.num_walks},
        {"window", cfg.walk.window},
        {"negatives_per_positive", cfg.walk.negatives_per_positive},
        {"negative_distribution", std::string(ToString(cfg.walk.negatives))}}},
      {"loss",
       {{"lambda_ent", cfg.loss.lambda_ent},
        {"lambda_dis", cfg.loss.lambda_dis},
        {"epochs", cfg.loss.epochs},
        {"learning_rate", cfg.loss.learning_rate},
        {"batch_size", cfg.loss.batch_size},
        {"beta1", cfg.loss.beta1},
        {"beta2", cfg.loss.beta2},
        {"adam_eps", cfg.loss.adam_eps}}},
      {"seeds", cfg.seeds},
      {"test_fraction", cfg.test_fraction},
      {"background", std::string(ToString(cfg.background))},
      {"metrics", {{"ovc", cfg.ovc}, {"poc", cfg.poc}, {"num_permutations", cfg.num_permutations}}},
      {"task",
       {{"mask_universe", std::string(ToString(cfg.mask_universe))},
        {"node_test_fraction", cfg.node_test_fraction}}},
      {"out", cfg.out.string()},
      {"threads", cfg.threads},
      {"deterministic", cfg.deterministic},
  };
}

RunConfig FromJson(const Json& doc, RunConfig cfg) {
  RejectUnknown(doc,
                {"dataset", "encoder", "activation", "hidden_dim", "output_dim", "walk", "loss", "seeds",
                 "test_fraction", "background", "metrics", "task", "out", "threads", "deterministic"},
                "");
  if (doc.contains("dataset")) {
    const auto& d = doc["dataset"];
    RejectUnknown(d,
                  {"kind", "num_cliques", "clique_size", "base_nodes", "attach_edges_per_clique", "er_p",
                   "sbm_p_out", "ba_m", "noise_edges", "seed", "edges", "labels", "ground_truth"},
                  "dataset");
    if (d.contains("kind")) {
      if (d.contains("edges")) throw Error("config: dataset takes either \"kind\" or \"edges\", not both");
      std::string kind;
      Take(d, "kind", kind);
      const auto parsed = ParseSynthKind(kind);
      SynthSpec spec = cfg.dataset.synthetic && cfg.dataset.synthetic->kind == parsed ? *cfg.dataset.synthetic
                                                                                     : DefaultSpec(parsed);
      Take(d, "num_cliques", spec.num_cliques);
      Take(d, "clique_size", spec.clique_size);
      Take(d, "base_nodes", spec.base_nodes);
      Take(d, "attach_edges_per_clique", spec.attach_edges_per_clique);
      Take(d, "er_p", spec.er_p);
      Take(d, "sbm_p_out", spec.sbm_p_out);
      Take(d, "ba_m", spec.ba_m);
      Take(d, "noise_edges", spec.noise_edges);
      Take(d, "seed", spec.seed);
      cfg.dataset = DatasetConfig{spec, {}, {}, {}};
    } else {
      for (const char* key : {"num_cliques", "clique_size", "base_nodes", "attach_edges_per_clique", "er_p",
                              "sbm_p_out", "ba_m", "noise_edges", "seed"}) {
        if (d.contains(key)) throw Error(std::string("config: dataset.") + key + " needs dataset.kind");
      }
      std::string edges, labels, gt;
      Take(d, "edges", edges);
      Take(d, "labels", labels);
      Take(d, "ground_truth", gt);
      cfg.dataset = DatasetConfig{std::nullopt, edges, labels, gt};
    }
  }
  if (doc.contains("encoder")) cfg.encoder = ParseEncoderKind(doc["encoder"].get<std::string>());
  if (doc.contains("activation")) cfg.activation = ParseActivation(doc["activation"].get<std::string>());
  Take(doc, "hidden_dim", cfg.hidden_dim);
  Take(doc, "output_dim", cfg.output_dim);
  if (doc.contains("walk")) {
    const auto& w = doc["walk"];
    RejectUnknown(w, {"walk_length", "num_walks", "window", "negatives_per_positive", "negative_distribution"}, "walk");
    Take(w, "walk_length", cfg.walk.walk_length);
    Take(w, "num_walks", cfg.walk.num_walks);
    Take(w, "window", cfg.walk.window);
    Take(w, "negatives_per_positive", cfg.walk.negatives_per_positive);
    if (w.contains("negative_distribution")) {
      cfg.walk.negatives = ParseNegativeDistribution(w["negative_distribution"].get<std::string>());
    }
  }
  if (doc.contains("loss")) {
    const auto& l = doc["loss"];
    RejectUnknown(l, {"lambda_ent", "lambda_dis", "epochs", "learning_rate", "batch_size", "beta1", "beta2", "adam_eps"},
                  "loss");
    Take(l, "lambda_ent", cfg.loss.lambda_ent);
    Take(l, "lambda_dis", cfg.loss.lambda_dis);
    Take(l, "epochs", cfg.loss.epochs);
    Take(l, "learning_rate", cfg.loss.learning_rate);
    Take(l, "batch_size", cfg.loss.batch_size);
    Take(l, "beta1", cfg.loss.beta1);
    Take(l, "beta2", cfg.loss.beta2);
    Take(l, "adam_eps", cfg.loss.adam_eps);
  }
  Take(doc, "seeds", cfg.seeds);
  Take(doc, "test_fraction", cfg.test_fraction);
  if (doc.contains("background")) cfg.background = ParseBackground(doc["background"].get<std::string>());
  if (doc.contains("metrics")) {
    const auto& m = doc["metrics"];
    RejectUnknown(m, {"ovc", "poc", "num_permutations"}, "metrics");
    Take(m, "ovc", cfg.ovc);
    Take(m, "poc", cfg.poc);
    Take(m, "num_permutations", cfg.num_permutations);
  }
  if (doc.contains("task")) {
    const auto& t = doc["task"];
    RejectUnknown(t, {"mask_universe", "node_test_fraction"}, "task");
    if (t.contains("mask_universe")) cfg.mask_universe = ParseUniverse(t["mask_universe"].get<std::string>());
    Take(t, "node_test_fraction", cfg.node_test_fraction);
  }
  if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
  Take(doc, "threads", cfg.threads);
  Take(doc, "deterministic", cfg.deterministic);
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path, RunConfig base) {
  return FromJson(ReadJson(path), std::move(base));
}

std::string ConfigHash(const RunConfig& cfg) {
  Json j = ToJson(cfg);
  j.erase("seeds");
  j.erase("out");
  j.erase("threads");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunSeeds RunSeeds::From(std::uint64_t seed) {
  return {DeriveSeed(seed, 10), DeriveSeed(seed, 11), DeriveSeed(seed, 12), DeriveSeed(seed, 13),
          DeriveSeed(seed, 14)};
}

}  // namespace disene
