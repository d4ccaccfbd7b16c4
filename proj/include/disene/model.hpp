#pragma once

#include <optional>
#include <string_view>

#include <Eigen/SparseCore>

#include "disene/graph.hpp"

namespace disene {

enum class EncoderKind { kFc, kGcn };

// kLinear leaves H signed; it exists for the plain skip-gram baseline, which
// has no entropy term and therefore no non-negativity requirement.
enum class Activation { kRelu, kSoftplus, kLinear };

std::string_view ToString(EncoderKind kind);
std::string_view ToString(Activation act);
EncoderKind ParseEncoderKind(std::string_view name);
Activation ParseActivation(std::string_view name);

// Encoder with identity node features: W1 holds one D-row per node.
struct EncoderParams {
  EncoderKind kind = EncoderKind::kFc;
  Activation activation = Activation::kRelu;
  Matrix W1;  // V x D
  Matrix W;   // D x K

  std::size_t num_nodes() const { return static_cast<std::size_t>(W1.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(W1.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(W.cols()); }
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// D~^{-1/2} (A + I) D~^{-1/2}
struct NormalizedAdjacency {
  SparseMatrix matrix;
};

NormalizedAdjacency NormalizeAdjacency(const Graph& g);

// Glorot-uniform W1 and W, bound sqrt(6 / (fan_in + fan_out)).
EncoderParams InitParams(std::size_t num_nodes, EncoderKind kind, std::size_t hidden_dim,
                         std::size_t output_dim, std::uint64_t seed,
                         Activation activation = Activation::kRelu);

double Activate(Activation act, double x);
double ActivationDerivative(Activation act, double x);

// Intermediate values kept for the backward pass.
struct ForwardPass {
  Matrix Z;    // V x D
  Matrix pre;  // V x K
  Matrix H;    // V x K
};

// `adjacency` is required for the gcn encoder and ignored for fc.
ForwardPass Forward(const EncoderParams& params, const NormalizedAdjacency* adjacency);
Matrix Encode(const EncoderParams& params, const NormalizedAdjacency* adjacency);

// sigma(h(u) . h(v))
double EdgeLikelihood(const Matrix& H, NodeId u, NodeId v);

double Sigmoid(double x);

}  // namespace disene
