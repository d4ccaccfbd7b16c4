#include "disene/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace disene {

double F1Score(const WeightedSet& mask, std::span<const std::uint32_t> community) {
  if (mask.empty() || community.empty()) return 0.0;
  const double total = mask.total();
  if (!(total > 0)) return 0.0;
  double inside = 0.0;
  std::size_t covered = 0;
  // Merge walk over the two sorted key lists.
  std::size_t i = 0, j = 0;
  while (i < mask.keys.size() && j < community.size()) {
    if (mask.keys[i] < community[j]) {
      ++i;
    } else if (community[j] < mask.keys[i]) {
      ++j;
    } else {
      inside += mask.weights[i];
      if (mask.weights[i] > 0) ++covered;
      ++i;
      ++j;
    }
  }
  const double precision = inside / total;
  const double recall = static_cast<double>(covered) / static_cast<double>(community.size());
  if (precision + recall <= 0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Comprehensibility ComputeComprehensibility(const EdgeMask& mask, const GroundTruth& truth) {
  if (truth.communities.empty()) throw Error("ground truth has no communities");
  Comprehensibility best;
  if (mask.empty()) return best;
  for (std::size_t c = 0; c < truth.communities.size(); ++c) {
    const double f1 = F1Score(mask, truth.communities[c].edges);
    if (best.best_community < 0 || f1 > best.score) {
      best.score = f1;
      best.best_community = static_cast<int>(c);
    }
  }
  return best;
}

double Sparsity(const EdgeMask& mask, std::size_t total_edges) {
  if (total_edges < 2) throw Error("sparsity needs at least 2 edges");
  const double total = mask.total();
  if (mask.empty() || !(total > 0)) return 0.0;
  double entropy = 0.0;
  for (double w : mask.weights) {
    const double p = w / total;
    if (p > 0) entropy -= p * std::log(p);
  }
  return entropy / std::log(static_cast<double>(total_edges));
}

double Jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t common = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t unite = a.size() + b.size() - common;
  return unite == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unite);
}

MaybeScalar Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson inputs differ in length");
  if (x.size() < 2) return MaybeScalar::Null("fewer than 2 observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0 || syy <= 0) return MaybeScalar::Null("zero variance");
  return MaybeScalar::Of(std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0));
}

namespace {

std::vector<double> Column(const Matrix& H, Eigen::Index c) {
  std::vector<double> out(static_cast<std::size_t>(H.rows()));
  for (Eigen::Index r = 0; r < H.rows(); ++r) out[static_cast<std::size_t>(r)] = H(r, c);
  return out;
}

bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

MaybeScalar OverlapConsistency(const Matrix& H, const Explanation& explanation) {
  const auto k = static_cast<std::size_t>(H.cols());
  if (k < 3) return MaybeScalar::Null("needs K >= 3");
  std::vector<std::vector<double>> cols(k);
  std::vector<bool> constant(k);
  for (std::size_t d = 0; d < k; ++d) {
    cols[d] = Column(H, static_cast<Eigen::Index>(d));
    constant[d] = IsConstant(cols[d]);
  }
  std::vector<double> overlaps, squared;
  for (std::size_t d = 0; d < k; ++d) {
    for (std::size_t l = d + 1; l < k; ++l) {
      if (constant[d] || constant[l]) continue;
      const auto rho = Pearson(cols[d], cols[l]);
      if (!rho.has_value()) continue;
      overlaps.push_back(Jaccard(explanation.dims[d].edges, explanation.dims[l].edges));
      squared.push_back(*rho.value * *rho.value);
    }
  }
  if (overlaps.size() < 3) return MaybeScalar::Null("fewer than 3 dimension pairs with defined correlation");
  auto r = Pearson(overlaps, squared);
  if (!r.has_value()) return MaybeScalar::Null("zero variance in overlap or correlation vector");
  return r;
}

std::vector<double> AnchorProximity(const HopMatrix& distances, std::span<const NodeId> anchors) {
  std::unordered_map<NodeId, std::size_t> row_of;
  for (std::size_t r = 0; r < distances.anchors.size(); ++r) row_of.emplace(distances.anchors[r], r);
  std::vector<double> zeta(distances.num_nodes, 0.0);
  for (NodeId a : anchors) {
    auto it = row_of.find(a);
    if (it == row_of.end()) throw Error("distance table has no row for anchor " + std::to_string(a));
    for (NodeId u = 0; u < distances.num_nodes; ++u) {
      const auto d = distances.at(it->second, u);
      if (d != kUnreachable) zeta[u] += 1.0 / (1.0 + static_cast<double>(d));
    }
  }
  return zeta;
}

MaybeScalar Fpc(const Matrix& H, const Explanation& explanation, std::size_t d, std::size_t l,
                const HopMatrix& distances) {
  const auto& anchors = explanation.dims.at(d).nodes;
  if (anchors.empty()) return MaybeScalar::Null("explanation subgraph is empty");
  const auto zeta = AnchorProximity(distances, anchors);
  return Pearson(zeta, Column(H, static_cast<Eigen::Index>(l)));
}

FpcMatrix ComputeFpcMatrix(const Matrix& H, const Explanation& explanation, const HopMatrix& distances) {
  const auto k = H.cols();
  const auto n = H.rows();
  FpcMatrix out;
  out.values = Matrix::Zero(k, k);
  out.row_valid.assign(static_cast<std::size_t>(k), false);
  out.col_valid.assign(static_cast<std::size_t>(k), false);

  // Centered, unit-norm columns so that correlations become dot products.
  auto standardize = [](Eigen::Ref<Vector> v) {
    v.array() -= v.mean();
    const double norm = v.norm();
    if (norm <= 0) return false;
    v /= norm;
    return true;
  };
  Eigen::MatrixXd prox(n, k), feat(n, k);
  for (Eigen::Index d = 0; d < k; ++d) {
    const auto& anchors = explanation.dims[static_cast<std::size_t>(d)].nodes;
    Vector z = Vector::Zero(n);
    if (!anchors.empty()) {
      const auto zeta = AnchorProximity(distances, anchors);
      z = Eigen::Map<const Vector>(zeta.data(), n);
      out.row_valid[static_cast<std::size_t>(d)] = !IsConstant(zeta) && standardize(z);
    }
    prox.col(d) = z;
    Vector h = H.col(d);
    out.col_valid[static_cast<std::size_t>(d)] = !IsConstant(Column(H, d)) && standardize(h);
    feat.col(d) = h;
  }
  out.values = (prox.transpose() * feat).cwiseMax(-1.0).cwiseMin(1.0);
  return out;
}

std::vector<std::size_t> DiagonalSupport(const FpcMatrix& fpc) {
  std::vector<std::size_t> dims;
  for (std::size_t d = 0; d < fpc.row_valid.size(); ++d) {
    if (fpc.row_valid[d] && fpc.col_valid[d]) dims.push_back(d);
  }
  return dims;
}

MaybeScalar PositionalCoherenceFromFpc(const FpcMatrix& fpc, std::size_t num_permutations,
                                       std::uint64_t seed) {
  const auto dims = DiagonalSupport(fpc);
  if (dims.size() < 2) return MaybeScalar::Null("fewer than 2 dimensions with defined FPC");
  if (num_permutations < 1) throw Error("num_permutations must be >= 1");
  double numerator = 0;
  for (auto d : dims) numerator += fpc.values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

  Rng rng(seed);
  std::vector<std::size_t> perm = dims;
  double acc = 0;
  for (std::size_t p = 0; p < num_permutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      acc += fpc.values(static_cast<Eigen::Index>(dims[i]), static_cast<Eigen::Index>(perm[i]));
    }
  }
  const double denominator = acc / static_cast<double>(num_permutations);
  if (std::abs(denominator) < 1e-9) return MaybeScalar::Null("permuted FPC mean is ~0");
  return MaybeScalar::Of(numerator / denominator);
}

MaybeScalar PositionalCoherence(const Matrix& H, const Explanation& explanation,
                                const HopMatrix& distances, std::size_t num_permutations,
                                std::uint64_t seed) {
  return PositionalCoherenceFromFpc(ComputeFpcMatrix(H, explanation, distances), num_permutations, seed);
}

double AucPr(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == labels.size()) throw Error("AUC-PR needs both classes");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size();) {
    // Tied scores share one threshold: precision is taken after the group.
    std::size_t end = rank, group_hits = 0;
    for (; end < order.size() && scores[order[end]] == scores[order[rank]]; ++end) {
      group_hits += labels[order[end]] == 1;
    }
    hits += group_hits;
    sum += static_cast<double>(group_hits) * static_cast<double>(hits) / static_cast<double>(end);
    rank = end;
  }
  return sum / static_cast<double>(positives);
}

MetricsReport EvaluateEmbedding(const Matrix& H, const Graph& g, const GroundTruth& truth,
                                const Explanation& explanation, const HopMatrix* distances,
                                const MetricsOptions& options) {
  MetricsReport report;
  const auto k = explanation.dims.size();
  double comp_sum = 0, sp_sum = 0;
  for (const auto& dim : explanation.dims) {
    DimensionMetrics m;
    m.num_edges = dim.edges.size();
    if (!dim.empty()) {
      if (!truth.communities.empty()) {
        const auto c = ComputeComprehensibility(dim.mask, truth);
        m.comprehensibility = c.score;
        m.best_community = c.best_community;
      }
      m.sparsity = Sparsity(dim.mask, g.num_edges());
    }
    comp_sum += m.comprehensibility;
    sp_sum += m.sparsity;
    report.per_dimension.push_back(m);
  }
  report.empty_dims = explanation.num_empty();
  if (!truth.communities.empty()) report.comprehensibility_mean = k ? comp_sum / static_cast<double>(k) : 0.0;
  report.sparsity_score = k ? 1.0 - sp_sum / static_cast<double>(k) : 0.0;
  if (options.overlap_consistency) report.ovc = OverlapConsistency(H, explanation);
  if (options.positional_coherence) {
    if (distances == nullptr) throw Error("positional coherence needs a distance table");
    report.poc = PositionalCoherence(H, explanation, *distances, options.num_permutations, options.seed);
  }
  return report;
}

}  // namespace disene
