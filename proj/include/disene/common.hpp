#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace disene {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// Dense row-major storage keeps per-node rows contiguous for pair loops.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unordered edge in canonical form (u < v).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge Canonical(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  auto operator<=>(const Edge&) const = default;
};

// Ordered node pair, as emitted by the walk corpus and negative sampler.
struct NodePair {
  NodeId first = 0;
  NodeId second = 0;
  auto operator<=>(const NodePair&) const = default;
};

// A scalar that may be undefined, together with the reason it is undefined.
struct MaybeScalar {
  std::optional<double> value;
  std::string reason;

  static MaybeScalar Of(double v) { return {v, {}}; }
  static MaybeScalar Null(std::string why) { return {std::nullopt, std::move(why)}; }
  bool has_value() const { return value.has_value(); }
};

// Sparse non-negative weights keyed by edge or node index, keys sorted ascending.
struct WeightedSet {
  std::vector<std::uint32_t> keys;
  std::vector<double> weights;

  std::size_t size() const { return keys.size(); }
  bool empty() const { return keys.empty(); }
  double total() const;
};

using EdgeMask = WeightedSet;
using NodeMask = WeightedSet;

using Rng = std::mt19937_64;

// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace disene
