#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "disene/graph.hpp"

namespace disene {

struct LogRegModel {
  Vector coefficients;     // beta_1..beta_K
  double intercept = 0.0;  // beta_0
  Vector background_mean;  // training-feature means, the LinearSHAP baseline

  double Logit(const Eigen::Ref<const Vector>& x) const { return coefficients.dot(x) + intercept; }
};

struct LogRegOptions {
  double l2 = 1e-4;  // on coefficients, intercept unpenalized
  std::size_t max_iters = 100;
  double tolerance = 1e-10;
};

// Minimizes mean log-loss + l2/2 |beta|^2 with damped Newton steps.
// Rows of `features` are instances. Throws on single-class labels.
LogRegModel FitLogReg(const Eigen::MatrixXd& features, std::span<const int> labels,
                      const LogRegOptions& options = {}, std::uint64_t seed = 0);

// h(u) ⊙ h(v)
Vector EdgeFeatures(const Matrix& H, NodeId u, NodeId v);

// Psi_j = beta_j (x_j - mu_j)
Vector LinearShap(const LogRegModel& model, const Eigen::Ref<const Vector>& x);

// One mask per feature over the instance universe: weight max(0, Psi_j).
struct TaskMasks {
  std::vector<WeightedSet> per_feature;
};

// `attributions` holds one Psi row per instance; `keys` are the instance ids
// (edge ids for the link task, node ids for the node task).
TaskMasks BuildTaskMasks(const Eigen::MatrixXd& attributions, std::span<const std::uint32_t> keys);

// sum_j f(Psi_j) F1(B_j, C_g) / sum_j f(Psi_j) with f = max(0, .); null when
// every Psi_j <= 0. `community` holds the sorted keys of C_g.
std::optional<double> Plausibility(const Eigen::Ref<const Vector>& psi, const TaskMasks& masks,
                                   std::span<const std::uint32_t> community);

enum class TaskKind { kLinkPrediction, kNodeClassification };
std::string_view ToString(TaskKind task);

// Which instances populate the task masks B_j.
enum class MaskUniverse {
  kAllInstances,         // every edge (link) / node (node task) of the graph
  kQualifyingInstances,  // only the evaluated ground-truth instances
};

struct TaskOptions {
  LogRegOptions logreg;
  MaskUniverse universe = MaskUniverse::kAllInstances;
  double node_test_fraction = 0.2;
};

struct InstanceScore {
  std::uint32_t key = 0;  // edge id or node id
  int community = -1;
  double plausibility = 0;
};

struct TaskResult {
  TaskKind task = TaskKind::kLinkPrediction;
  double auc_pr = 0;
  std::optional<double> mean_plausibility;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // instances whose Psi are all non-positive
  std::vector<InstanceScore> instances;
};

// Link task: classifier on train edges vs sampled non-edges, AUC-PR on the
// split's test edges and negatives, plausibility over test edges inside a
// community. Node task: in-community vs background nodes with a random
// node split, plausibility over test nodes inside a community. Plausibility
// stays empty when no test instance lies inside a community.
TaskResult RunTask(TaskKind task, const Matrix& H, const Graph& g, const EdgeSplit& split,
                   const GroundTruth& truth, std::uint64_t seed, const TaskOptions& options = {});

}  // namespace disene
