#include "disene/model.hpp"

#include <cmath>

namespace disene {

std::string_view ToString(EncoderKind kind) { return kind == EncoderKind::kFc ? "fc" : "gcn"; }

std::string_view ToString(Activation act) {
  switch (act) {
    case Activation::kRelu: return "relu";
    case Activation::kSoftplus: return "softplus";
    case Activation::kLinear: return "linear";
  }
  return "?";
}

EncoderKind ParseEncoderKind(std::string_view name) {
  if (name == "fc") return EncoderKind::kFc;
  if (name == "gcn") return EncoderKind::kGcn;
  throw Error("unknown encoder kind: " + std::string(name));
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "linear") return Activation::kLinear;
  throw Error("unknown activation: " + std::string(name));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

NormalizedAdjacency NormalizeAdjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<double> inv_sqrt(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.num_nodes() + 2 * g.num_edges());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    entries.emplace_back(v, v, inv_sqrt[v] * inv_sqrt[v]);
    for (NodeId w : g.neighbors(v)) entries.emplace_back(v, w, inv_sqrt[v] * inv_sqrt[w]);
  }
  NormalizedAdjacency out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(entries.begin(), entries.end());
  return out;
}

EncoderParams InitParams(std::size_t num_nodes, EncoderKind kind, std::size_t hidden_dim,
                         std::size_t output_dim, std::uint64_t seed, Activation activation) {
  if (num_nodes < 1 || hidden_dim < 1 || output_dim < 1) throw Error("encoder sizes must be >= 1");
  EncoderParams p;
  p.kind = kind;
  p.activation = activation;
  Rng rng(seed);
  auto fill = [&](Matrix& m, std::size_t rows, std::size_t cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  };
  fill(p.W1, num_nodes, hidden_dim);
  fill(p.W, hidden_dim, output_dim);
  return p;
}

double Activate(Activation act, double x) {
  switch (act) {
    case Activation::kRelu: return x > 0 ? x : 0.0;
    case Activation::kSoftplus: return x > 30 ? x : std::log1p(std::exp(x));
    case Activation::kLinear: return x;
  }
  return x;
}

double ActivationDerivative(Activation act, double x) {
  switch (act) {
    case Activation::kRelu: return x > 0 ? 1.0 : 0.0;
    case Activation::kSoftplus: return Sigmoid(x);
    case Activation::kLinear: return 1.0;
  }
  return 1.0;
}

ForwardPass Forward(const EncoderParams& params, const NormalizedAdjacency* adjacency) {
  ForwardPass f;
  if (params.kind == EncoderKind::kGcn) {
    if (adjacency == nullptr) throw Error("gcn encoder needs the normalized adjacency");
    if (adjacency->matrix.rows() != params.W1.rows()) throw Error("adjacency does not match encoder");
    f.Z = adjacency->matrix * params.W1;
  } else {
    f.Z = params.W1;
  }
  f.pre.noalias() = f.Z * params.W;
  f.H = f.pre.unaryExpr([act = params.activation](double x) { return Activate(act, x); });
  if (!f.H.allFinite()) throw Error("encoder produced non-finite values");
  return f;
}

Matrix Encode(const EncoderParams& params, const NormalizedAdjacency* adjacency) {
  return Forward(params, adjacency).H;
}

double EdgeLikelihood(const Matrix& H, NodeId u, NodeId v) {
  return Sigmoid(H.row(u).dot(H.row(v)));
}

}  // namespace disene
