#include "disene/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "disene/metrics.hpp"
#include "disene/model.hpp"

namespace disene {

namespace {

double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double Objective(const Eigen::MatrixXd& design, const Vector& y, const Vector& theta, double l2) {
  const Vector z = design * theta;
  double loss = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += Softplus(z[i]) - y[i] * z[i];
  const auto k = theta.size() - 1;
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * theta.head(k).squaredNorm();
}

}  // namespace

LogRegModel FitLogReg(const Eigen::MatrixXd& features, std::span<const int> labels,
                      const LogRegOptions& options, std::uint64_t /*seed*/) {
  const auto n = features.rows();
  const auto k = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw Error("features and labels differ in length");
  if (!features.allFinite()) throw Error("features must be finite");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == n) throw Error("logistic regression needs both classes");

  Eigen::MatrixXd design(n, k + 1);
  design.leftCols(k) = features;
  design.col(k).setOnes();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;

  Vector theta = Vector::Zero(k + 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  double current = Objective(design, y, theta, options.l2);
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    const Vector z = design * theta;
    Vector p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = Sigmoid(z[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    Vector grad = design.transpose() * (p - y) * inv_n;
    grad.head(k) += options.l2 * theta.head(k);
    if (grad.lpNorm<Eigen::Infinity>() < options.tolerance) break;

    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design * inv_n;
    hessian.diagonal().head(k).array() += options.l2;
    hessian.diagonal().array() += 1e-12;
    const Vector step = hessian.ldlt().solve(grad);

    double t = 1.0;
    Vector candidate = theta - step;
    double value = Objective(design, y, candidate, options.l2);
    while (value > current && t > 1e-8) {
      t *= 0.5;
      candidate = theta - t * step;
      value = Objective(design, y, candidate, options.l2);
    }
    if (value > current) break;
    const double moved = (candidate - theta).lpNorm<Eigen::Infinity>();
    theta = std::move(candidate);
    current = value;
    if (moved < options.tolerance) break;
  }

  LogRegModel model;
  model.coefficients = theta.head(k);
  model.intercept = theta[k];
  model.background_mean = features.colwise().mean().transpose();
  return model;
}

Vector EdgeFeatures(const Matrix& H, NodeId u, NodeId v) {
  return H.row(u).cwiseProduct(H.row(v)).transpose();
}

Vector LinearShap(const LogRegModel& model, const Eigen::Ref<const Vector>& x) {
  return model.coefficients.cwiseProduct(x - model.background_mean);
}

TaskMasks BuildTaskMasks(const Eigen::MatrixXd& attributions, std::span<const std::uint32_t> keys) {
  if (static_cast<std::size_t>(attributions.rows()) != keys.size()) {
    throw Error("one attribution row per instance key expected");
  }
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });

  TaskMasks masks;
  masks.per_feature.resize(static_cast<std::size_t>(attributions.cols()));
  for (Eigen::Index j = 0; j < attributions.cols(); ++j) {
    auto& mask = masks.per_feature[static_cast<std::size_t>(j)];
    for (auto i : order) {
      const double psi = attributions(static_cast<Eigen::Index>(i), j);
      if (psi > 0) {
        mask.keys.push_back(keys[i]);
        mask.weights.push_back(psi);
      }
    }
  }
  return masks;
}

std::optional<double> Plausibility(const Eigen::Ref<const Vector>& psi, const TaskMasks& masks,
                                   std::span<const std::uint32_t> community) {
  if (static_cast<std::size_t>(psi.size()) != masks.per_feature.size()) {
    throw Error("attribution length does not match the number of task masks");
  }
  double weighted = 0, total = 0;
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const double f = std::max(0.0, psi[j]);
    if (f <= 0) continue;
    total += f;
    weighted += f * F1Score(masks.per_feature[static_cast<std::size_t>(j)], community);
  }
  if (total <= 0) return std::nullopt;
  return weighted / total;
}

std::string_view ToString(TaskKind task) {
  return task == TaskKind::kLinkPrediction ? "link_prediction" : "node_classification";
}

namespace {

struct Evaluation {
  std::vector<std::uint32_t> keys;
  std::vector<int> communities;
};

void ScorePlausibility(const LogRegModel& model, const Eigen::MatrixXd& universe_features,
                       std::span<const std::uint32_t> universe_keys, const Eigen::MatrixXd& eval_features,
                       const Evaluation& eval, const GroundTruth& truth, TaskKind task,
                       TaskResult& result) {
  Eigen::MatrixXd universe_psi(universe_features.rows(), universe_features.cols());
  for (Eigen::Index i = 0; i < universe_features.rows(); ++i) {
    universe_psi.row(i) = LinearShap(model, universe_features.row(i).transpose()).transpose();
  }
  const TaskMasks masks = BuildTaskMasks(universe_psi, universe_keys);

  double sum = 0;
  for (std::size_t i = 0; i < eval.keys.size(); ++i) {
    const auto& community = truth.communities[static_cast<std::size_t>(eval.communities[i])];
    const std::span<const std::uint32_t> target =
        task == TaskKind::kLinkPrediction ? std::span<const std::uint32_t>(community.edges)
                                          : std::span<const std::uint32_t>(community.nodes);
    const Vector psi = LinearShap(model, eval_features.row(static_cast<Eigen::Index>(i)).transpose());
    const auto value = Plausibility(psi, masks, target);
    if (!value) {
      ++result.skipped;
      continue;
    }
    result.instances.push_back({eval.keys[i], eval.communities[i], *value});
    sum += *value;
  }
  result.evaluated = result.instances.size();
  if (result.evaluated > 0) result.mean_plausibility = sum / static_cast<double>(result.evaluated);
}

Eigen::MatrixXd EdgeFeatureRows(const Matrix& H, std::span<const Edge> edges) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(edges.size()), H.cols());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = H.row(edges[i].u).cwiseProduct(H.row(edges[i].v));
  }
  return X;
}

TaskResult RunLinkTask(const Matrix& H, const Graph& g, const EdgeSplit& split, const GroundTruth& truth,
                       std::uint64_t seed, const TaskOptions& options) {
  TaskResult result;
  result.task = TaskKind::kLinkPrediction;
  Rng rng(seed);

  std::vector<Edge> train;
  for (EdgeId e : split.train_edges) train.push_back(g.edge(e));
  const auto train_negatives = SampleNonEdges(g, train.size(), rng);
  std::vector<int> labels(train.size(), 1);
  labels.resize(train.size() + train_negatives.size(), 0);
  train.insert(train.end(), train_negatives.begin(), train_negatives.end());
  const LogRegModel model = FitLogReg(EdgeFeatureRows(H, train), labels, options.logreg, seed);

  std::vector<Edge> test;
  for (EdgeId e : split.test_edges) test.push_back(g.edge(e));
  std::vector<int> test_labels(test.size(), 1);
  test_labels.resize(test.size() + split.test_negatives.size(), 0);
  test.insert(test.end(), split.test_negatives.begin(), split.test_negatives.end());
  const Eigen::MatrixXd test_x = EdgeFeatureRows(H, test);
  std::vector<double> scores(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) scores[i] = model.Logit(test_x.row(static_cast<Eigen::Index>(i)).transpose());
  result.auc_pr = AucPr(scores, test_labels);

  const auto edge_community = truth.EdgeIndex(g.num_edges());
  Evaluation eval;
  std::vector<Edge> eval_edges;
  for (EdgeId e : split.test_edges) {
    if (edge_community[e] >= 0) {
      eval.keys.push_back(e);
      eval.communities.push_back(edge_community[e]);
      eval_edges.push_back(g.edge(e));
    }
  }
  if (eval.keys.empty()) return result;  // plausibility undefined

  std::vector<std::uint32_t> universe_keys;
  std::vector<Edge> universe_edges;
  if (options.universe == MaskUniverse::kAllInstances) {
    universe_keys = AllEdgeIds(g);
    universe_edges.assign(g.edges().begin(), g.edges().end());
  } else {
    universe_keys = eval.keys;
    universe_edges = eval_edges;
  }
  ScorePlausibility(model, EdgeFeatureRows(H, universe_edges), universe_keys, EdgeFeatureRows(H, eval_edges),
                    eval, truth, TaskKind::kLinkPrediction, result);
  return result;
}

TaskResult RunNodeTask(const Matrix& H, const Graph& g, const GroundTruth& truth, std::uint64_t seed,
                       const TaskOptions& options) {
  TaskResult result;
  result.task = TaskKind::kNodeClassification;
  const auto node_community = truth.NodeIndex(g.num_nodes());
  const auto n = g.num_nodes();
  const auto inside = std::count_if(node_community.begin(), node_community.end(), [](int c) { return c >= 0; });
  if (inside == 0 || static_cast<std::size_t>(inside) == n) {
    throw Error("node classification needs both community and background nodes");
  }

  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto num_test = static_cast<std::size_t>(std::llround(options.node_test_fraction * static_cast<double>(n)));
  if (num_test == 0 || num_test >= n) throw Error("node split leaves an empty side");
  std::vector<NodeId> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(num_test));
  std::vector<NodeId> train(order.begin() + static_cast<std::ptrdiff_t>(num_test), order.end());
  std::sort(test.begin(), test.end());

  auto rows = [&](std::span<const NodeId> nodes) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(nodes.size()), H.cols());
    for (std::size_t i = 0; i < nodes.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = H.row(nodes[i]);
    return X;
  };
  auto labels_of = [&](std::span<const NodeId> nodes) {
    std::vector<int> y(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) y[i] = node_community[nodes[i]] >= 0 ? 1 : 0;
    return y;
  };
  const LogRegModel model = FitLogReg(rows(train), labels_of(train), options.logreg, seed);

  const Eigen::MatrixXd test_x = rows(test);
  std::vector<double> scores(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) scores[i] = model.Logit(test_x.row(static_cast<Eigen::Index>(i)).transpose());
  result.auc_pr = AucPr(scores, labels_of(test));

  Evaluation eval;
  std::vector<NodeId> eval_nodes;
  for (NodeId v : test) {
    if (node_community[v] >= 0) {
      eval.keys.push_back(v);
      eval.communities.push_back(node_community[v]);
      eval_nodes.push_back(v);
    }
  }
  if (eval.keys.empty()) return result;

  std::vector<NodeId> universe;
  if (options.universe == MaskUniverse::kAllInstances) {
    universe.resize(n);
    std::iota(universe.begin(), universe.end(), 0);
  } else {
    universe = eval_nodes;
  }
  ScorePlausibility(model, rows(universe), universe, rows(eval_nodes), eval, truth,
                    TaskKind::kNodeClassification, result);
  return result;
}

}  // namespace

TaskResult RunTask(TaskKind task, const Matrix& H, const Graph& g, const EdgeSplit& split,
                   const GroundTruth& truth, std::uint64_t seed, const TaskOptions& options) {
  if (static_cast<std::size_t>(H.rows()) != g.num_nodes()) throw Error("embedding rows do not match graph");
  return task == TaskKind::kLinkPrediction ? RunLinkTask(H, g, split, truth, seed, options)
                                           : RunNodeTask(H, g, truth, seed, options);
}

}  // namespace disene
