#include "disene/explain.hpp"

#include <algorithm>
#include <numeric>

namespace disene {

std::vector<EdgeId> AllEdgeIds(const Graph& g) {
  std::vector<EdgeId> ids(g.num_edges());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

AttributionContext BuildAttributionContext(const Matrix& H, const Graph& g,
                                           std::span<const EdgeId> background) {
  if (background.empty()) throw Error("background edge set is empty");
  if (static_cast<std::size_t>(H.rows()) != g.num_nodes()) throw Error("embedding rows do not match graph");
  AttributionContext ctx;
  ctx.mean_products = Vector::Zero(H.cols());
  for (EdgeId id : background) {
    const auto& e = g.edge(id);
    ctx.mean_products += H.row(e.u).cwiseProduct(H.row(e.v)).transpose();
  }
  ctx.mean_products /= static_cast<double>(background.size());
  return ctx;
}

std::size_t Explanation::num_empty() const {
  return static_cast<std::size_t>(
      std::count_if(dims.begin(), dims.end(), [](const auto& d) { return d.empty(); }));
}

Explanation BuildExplanations(const Matrix& H, const Graph& g, std::span<const EdgeId> background) {
  Explanation out;
  out.context = BuildAttributionContext(H, g, background);
  std::vector<EdgeId> sorted(background.begin(), background.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const auto k = static_cast<std::size_t>(H.cols());
  out.dims.resize(k);
  for (std::size_t d = 0; d < k; ++d) {
    auto& dim = out.dims[d];
    for (EdgeId id : sorted) {
      const auto& e = g.edge(id);
      const double phi = Attribution(H, out.context, d, e.u, e.v);
      if (phi > 0) {
        dim.mask.keys.push_back(id);
        dim.mask.weights.push_back(phi);
        dim.edges.push_back(id);
        dim.nodes.push_back(e.u);
        dim.nodes.push_back(e.v);
      }
    }
    std::sort(dim.nodes.begin(), dim.nodes.end());
    dim.nodes.erase(std::unique(dim.nodes.begin(), dim.nodes.end()), dim.nodes.end());
  }
  return out;
}

Matrix AffiliationMatrix(const Matrix& H, const Explanation& explanation) {
  Matrix F = Matrix::Zero(H.rows(), H.cols());
  for (Eigen::Index d = 0; d < H.cols(); ++d) {
    const auto& nodes = explanation.dims[static_cast<std::size_t>(d)].nodes;
    if (nodes.empty()) continue;
    double anchor_sum = 0;
    for (NodeId v : nodes) anchor_sum += H(v, d);
    const double offset = static_cast<double>(nodes.size()) * explanation.context.mean_products[d];
    F.col(d) = H.col(d) * anchor_sum - Vector::Constant(H.rows(), offset);
  }
  return F;
}

}  // namespace disene
