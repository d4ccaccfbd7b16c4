#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disene/explain.hpp"
#include "disene/graph.hpp"

namespace disene {

// Weighted precision (sum of mask weight inside the community over total
// weight) and binarized recall (covered community items over community size).
// Works for edge masks against community edges and node masks against
// community nodes alike; `community` must be sorted.
double F1Score(const WeightedSet& mask, std::span<const std::uint32_t> community);

struct Comprehensibility {
  double score = 0;
  int best_community = -1;  // -1 for an empty mask
};

Comprehensibility ComputeComprehensibility(const EdgeMask& mask, const GroundTruth& truth);

// Normalized Shannon entropy of the mask distribution, divided by log(total_edges).
double Sparsity(const EdgeMask& mask, std::size_t total_edges);

// |a ∩ b| / |a ∪ b| over sorted id lists; 0 when both are empty.
double Jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

MaybeScalar Pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation between pairwise edge-set Jaccard indices and squared
// feature correlations over pairs d < l. Pairs involving a constant feature
// column have no defined correlation and are left out.
MaybeScalar OverlapConsistency(const Matrix& H, const Explanation& explanation);

// zeta(u, anchors) = sum_{v in anchors} 1 / (1 + dist(u, v)) for every node u;
// unreachable pairs contribute 0. `distances` needs a row for every anchor.
std::vector<double> AnchorProximity(const HopMatrix& distances, std::span<const NodeId> anchors);

MaybeScalar Fpc(const Matrix& H, const Explanation& explanation, std::size_t d, std::size_t l,
                const HopMatrix& distances);

// FPC for all (d, l). Row d is invalid when V_d is empty or its proximity
// vector is constant; column l is invalid when H_{:,l} is constant.
struct FpcMatrix {
  Matrix values;
  std::vector<bool> row_valid;
  std::vector<bool> col_valid;
};

FpcMatrix ComputeFpcMatrix(const Matrix& H, const Explanation& explanation, const HopMatrix& distances);

// Dimensions whose diagonal entry is defined.
std::vector<std::size_t> DiagonalSupport(const FpcMatrix& fpc);

// sum_d FPC(d,d) over the mean of sum_d FPC(d, pi(d)) across uniform random
// permutations of the supported dimensions (fixed points included).
MaybeScalar PositionalCoherenceFromFpc(const FpcMatrix& fpc, std::size_t num_permutations,
                                       std::uint64_t seed);

MaybeScalar PositionalCoherence(const Matrix& H, const Explanation& explanation,
                                const HopMatrix& distances, std::size_t num_permutations,
                                std::uint64_t seed);

// Average precision: sum over distinct score thresholds (descending) of
// recall gain times precision. Tied scores form one threshold, so the result
// does not depend on input order. Throws when only one class is present.
double AucPr(std::span<const double> scores, std::span<const int> labels);

struct DimensionMetrics {
  double comprehensibility = 0;
  int best_community = -1;
  double sparsity = 0;
  std::size_t num_edges = 0;
};

struct MetricsOptions {
  bool overlap_consistency = true;
  bool positional_coherence = true;
  std::size_t num_permutations = 100;
  std::uint64_t seed = 0;
};

struct MetricsReport {
  std::optional<double> comprehensibility_mean;  // absent without ground truth
  double sparsity_score = 0;  // 1 - mean_d Sp(M_d)
  std::optional<MaybeScalar> ovc;  // absent when toggled off
  std::optional<MaybeScalar> poc;
  std::size_t empty_dims = 0;
  std::vector<DimensionMetrics> per_dimension;
  std::map<std::string, double> auc_pr;
  std::map<std::string, std::string> metadata;
};

// `distances` may be null when positional coherence is toggled off. Without
// ground-truth communities comprehensibility is left out.
MetricsReport EvaluateEmbedding(const Matrix& H, const Graph& g, const GroundTruth& truth,
                                const Explanation& explanation, const HopMatrix* distances,
                                const MetricsOptions& options);

}  // namespace disene
