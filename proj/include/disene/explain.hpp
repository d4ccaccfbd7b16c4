#pragma once

#include <span>
#include <vector>

#include "disene/graph.hpp"

namespace disene {

// Per-dimension mean of h_d(u) h_d(v) over the background edge set.
struct AttributionContext {
  Vector mean_products;
};

AttributionContext BuildAttributionContext(const Matrix& H, const Graph& g,
                                           std::span<const EdgeId> background);

// phi_d(u, v) = h_d(u) h_d(v) - mu_d
inline double Attribution(const Matrix& H, const AttributionContext& ctx, std::size_t d, NodeId u,
                          NodeId v) {
  const auto dd = static_cast<Eigen::Index>(d);
  return H(u, dd) * H(v, dd) - ctx.mean_products[dd];
}

struct DimensionExplanation {
  EdgeMask mask;               // keys are edge ids, weights max(0, phi_d) > 0
  std::vector<EdgeId> edges;   // support of the mask
  std::vector<NodeId> nodes;   // endpoints of `edges`, sorted

  bool empty() const { return edges.empty(); }
};

struct Explanation {
  AttributionContext context;
  std::vector<DimensionExplanation> dims;

  std::size_t num_empty() const;
};

// Masks over the background edges; edges with phi_d == 0 are excluded.
Explanation BuildExplanations(const Matrix& H, const Graph& g, std::span<const EdgeId> background);

// Exact affiliation F_ud = sum_{v in V_d} phi_d(u, v).
Matrix AffiliationMatrix(const Matrix& H, const Explanation& explanation);

std::vector<EdgeId> AllEdgeIds(const Graph& g);

}  // namespace disene
