#include "disene/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace disene {

void Validate(const WalkConfig& cfg) {
  if (cfg.walk_length < 1 || cfg.num_walks < 1 || cfg.window < 1 || cfg.negatives_per_positive < 1) {
    throw Error("walk counts must all be >= 1");
  }
  if (cfg.window >= cfg.walk_length) throw Error("window must be shorter than the walk length");
}

std::vector<Walk> GenerateWalks(const Graph& g, const WalkConfig& cfg, int threads) {
  Validate(cfg);
  if (g.num_nodes() == 0) throw Error("cannot walk an empty graph");
  const std::size_t n = g.num_nodes();
  std::vector<Walk> walks(n * cfg.num_walks);

  auto walk_from = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      Rng rng(DeriveSeed(cfg.seed, s));
      for (std::size_t r = 0; r < cfg.num_walks; ++r) {
        Walk& w = walks[s * cfg.num_walks + r];
        w.reserve(cfg.walk_length);
        w.push_back(static_cast<NodeId>(s));
        while (w.size() < cfg.walk_length) {
          auto nb = g.neighbors(w.back());
          if (nb.empty()) break;
          std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
          w.push_back(nb[pick(rng)]);
        }
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, n);
  if (workers == 1) {
    walk_from(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(walk_from, b, e);
    }
  }
  return walks;
}

std::vector<NodePair> PairsFromWalks(std::span<const Walk> walks, std::size_t window) {
  if (window < 1) throw Error("window must be >= 1");
  std::vector<NodePair> pairs;
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t delta = 1; delta <= window && i + delta < w.size(); ++delta) {
        NodeId a = w[i], b = w[i + delta];
        if (a == b) continue;
        pairs.push_back({a, b});
        pairs.push_back({b, a});
      }
    }
  }
  return pairs;
}

std::vector<NodePair> SampleNegatives(const Graph& g, std::span<const NodePair> positives,
                                      std::size_t k, std::uint64_t seed, NegativeDistribution dist) {
  if (k < 1) throw Error("negatives per positive must be >= 1");
  if (g.num_nodes() == 0) throw Error("cannot sample negatives on an empty graph");
  Rng rng(seed);
  std::vector<NodePair> out;
  out.reserve(positives.size() * k);

  if (dist == NegativeDistribution::kUniform) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.num_nodes() - 1));
    for (const auto& p : positives) {
      for (std::size_t j = 0; j < k; ++j) out.push_back({pick(rng), p.second});
    }
  } else {
    std::vector<double> w(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) w[v] = std::pow(static_cast<double>(g.degree(v)), 0.75);
    std::discrete_distribution<NodeId> pick(w.begin(), w.end());
    for (const auto& p : positives) {
      for (std::size_t j = 0; j < k; ++j) out.push_back({pick(rng), p.second});
    }
  }
  return out;
}

PairBatch BuildPairBatch(const Graph& g, const WalkConfig& cfg, int threads) {
  auto walks = GenerateWalks(g, cfg, threads);
  PairBatch batch;
  batch.positives = PairsFromWalks(walks, cfg.window);
  batch.negatives = SampleNegatives(g, batch.positives, cfg.negatives_per_positive,
                                    DeriveSeed(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL, 0), cfg.negatives);
  return batch;
}

}  // namespace disene
