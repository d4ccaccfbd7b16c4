#pragma once

#include <span>
#include <vector>

#include "disene/graph.hpp"

namespace disene {

enum class NegativeDistribution {
  kUniform,       // u' uniform over all nodes
  kDegreeBiased,  // u' proportional to degree^0.75
};

struct WalkConfig {
  std::size_t walk_length = 20;
  std::size_t num_walks = 10;
  std::size_t window = 5;
  std::size_t negatives_per_positive = 1;
  NegativeDistribution negatives = NegativeDistribution::kUniform;
  std::uint64_t seed = 0;
};

void Validate(const WalkConfig& cfg);

using Walk = std::vector<NodeId>;

struct PairBatch {
  std::vector<NodePair> positives;
  std::vector<NodePair> negatives;
};

// Uniform (p = q = 1) walks, num_walks per start node. Walk r of start node s
// sits at index s * num_walks + r and is drawn from a stream seeded by
// (seed, s), so the corpus does not depend on the thread count.
std::vector<Walk> GenerateWalks(const Graph& g, const WalkConfig& cfg, int threads = 1);

// Both orientations of every pair within `window` positions; self pairs dropped.
std::vector<NodePair> PairsFromWalks(std::span<const Walk> walks, std::size_t window);

// k corrupted pairs (u', v) per positive (u, v).
std::vector<NodePair> SampleNegatives(const Graph& g, std::span<const NodePair> positives,
                                      std::size_t k, std::uint64_t seed,
                                      NegativeDistribution dist = NegativeDistribution::kUniform);

// Walks -> positives -> negatives in one call.
PairBatch BuildPairBatch(const Graph& g, const WalkConfig& cfg, int threads = 1);

}  // namespace disene
