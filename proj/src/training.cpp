#include "disene/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace disene {

void Validate(const LossConfig& cfg) {
  if (cfg.lambda_ent < 0 || cfg.lambda_dis < 0) throw Error("loss weights must be >= 0");
  if (cfg.epochs < 1) throw Error("epochs must be >= 1");
  if (!(cfg.learning_rate > 0)) throw Error("learning rate must be > 0");
}

namespace {

// -log clamp(sigma(x)) and its derivative in x (zero inside the clamp).
double PositiveTerm(double x, double* slope) {
  const double s = Sigmoid(x);
  if (s <= kProbClamp || s >= 1.0 - kProbClamp) {
    if (slope) *slope = 0.0;
    return -std::log(std::clamp(s, kProbClamp, 1.0 - kProbClamp));
  }
  if (slope) *slope = -(1.0 - s);
  return -std::log(s);
}

// -log clamp(sigma(-x)) and its derivative in x.
double NegativeTerm(double x, double* slope) {
  const double s = Sigmoid(-x);
  if (s <= kProbClamp || s >= 1.0 - kProbClamp) {
    if (slope) *slope = 0.0;
    return -std::log(std::clamp(s, kProbClamp, 1.0 - kProbClamp));
  }
  if (slope) *slope = 1.0 - s;
  return -std::log(s);
}

}  // namespace

double LossRw(const Matrix& H, const PairBatch& batch) {
  double loss = 0.0;
  for (const auto& p : batch.positives) loss += PositiveTerm(H.row(p.first).dot(H.row(p.second)), nullptr);
  for (const auto& p : batch.negatives) loss += NegativeTerm(H.row(p.first).dot(H.row(p.second)), nullptr);
  return loss;
}

Vector AffiliationColumnStats(const Matrix& H) { return H.colwise().sum().transpose(); }

double LossDis(const Matrix& H, Matrix* dH, double scale) {
  const Eigen::Index k = H.cols();
  if (k < 2) return 0.0;
  const Vector S = AffiliationColumnStats(H);
  const Matrix F = H * S.asDiagonal();
  const Matrix gram = F.transpose() * F;
  const Vector norms = gram.diagonal().cwiseMax(0.0).cwiseSqrt();

  double loss = 0.0;
  Matrix pair_coef = Matrix::Zero(k, k);  // 2 / den_dl
  Vector self_coef = Vector::Zero(k);     // 2 sum_l G_dl n_l / (n_d den_dl^2)
  for (Eigen::Index d = 0; d < k; ++d) {
    for (Eigen::Index l = 0; l < k; ++l) {
      if (d == l) continue;
      const double den = norms[d] * norms[l] + kCosineEps;
      loss += gram(d, l) / den;
      pair_coef(d, l) = 2.0 / den;
      if (norms[d] > 0) self_coef[d] += 2.0 * gram(d, l) * norms[l] / (norms[d] * den * den);
    }
  }
  if (dH != nullptr) {
    // dL/dF, then through F_{vd} = S_d H_{vd} with S_d = sum_u H_{ud}.
    Matrix dF = F * pair_coef;
    dF -= F * self_coef.asDiagonal();
    const Eigen::RowVectorXd through_sums = (dF.array() * H.array()).colwise().sum();
    Matrix grad = dF * S.asDiagonal();
    grad.rowwise() += through_sums;
    *dH += scale * grad;
  }
  return loss;
}

double EntropyReg(const Matrix& H, Matrix* dH, double scale) {
  const Eigen::Index k = H.cols();
  if (k < 2) return 0.0;
  const Vector sums = AffiliationColumnStats(H);
  const Vector mass = sums.cwiseMax(0.0);
  const double total = mass.sum();
  if (total <= kMassEps) return 1.0;
  const double log_k = std::log(static_cast<double>(k));
  double entropy = 0.0;
  for (Eigen::Index d = 0; d < k; ++d) {
    const double p = mass[d] / total;
    if (p > 0) entropy -= p * std::log(p);
  }
  if (dH != nullptr) {
    // d(penalty)/dS_d = (log p_d + entropy) / (total * log K); the log is
    // floored so an empty column gets a large but finite push.
    Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(k);
    for (Eigen::Index d = 0; d < k; ++d) {
      if (sums[d] < 0) continue;
      const double p = std::max(mass[d] / total, 1e-300);
      grad[d] = (std::log(p) + entropy) / (total * log_k);
    }
    dH->rowwise() += scale * grad;
  }
  return 1.0 - entropy / log_k;
}

PairObjective::WeightedPairs PairObjective::Aggregate(std::span<const NodePair> pairs) {
  std::vector<NodePair> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedPairs out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.pairs.push_back(sorted[i]);
    out.counts.push_back(static_cast<double>(j - i));
    i = j;
  }
  return out;
}

PairObjective::PairObjective(std::span<const NodePair> positives, std::span<const NodePair> negatives,
                             std::size_t num_nodes, Layout layout)
    : num_nodes_(num_nodes), layout_(layout) {
  if (positives.empty() && negatives.empty()) throw Error("pair batch is empty");
  auto check = [&](std::span<const NodePair> pairs) {
    for (const auto& p : pairs) {
      if (p.first >= num_nodes || p.second >= num_nodes) throw Error("pair node out of range");
    }
  };
  check(positives);
  check(negatives);
  if (layout_ == Layout::kAuto) {
    layout_ = num_nodes <= kDenseNodeLimit ? Layout::kDense : Layout::kSparse;
  }
  if (layout_ == Layout::kDense) {
    const auto n = static_cast<Eigen::Index>(num_nodes);
    positive_counts_ = Matrix::Zero(n, n);
    negative_counts_ = Matrix::Zero(n, n);
    for (const auto& p : positives) positive_counts_(p.first, p.second) += 1.0;
    for (const auto& p : negatives) negative_counts_(p.first, p.second) += 1.0;
  } else {
    positives_ = Aggregate(positives);
    negatives_ = Aggregate(negatives);
  }
}

double PairObjective::Evaluate(const Matrix& H, Matrix* dH) const {
  if (static_cast<std::size_t>(H.rows()) != num_nodes_) throw Error("embedding rows do not match objective");
  double loss = 0.0;
  if (layout_ == Layout::kDense) {
    const Matrix logits = H * H.transpose();
    const auto n = logits.rows();
    Matrix slopes;
    if (dH) slopes = Matrix::Zero(n, n);
    for (Eigen::Index u = 0; u < n; ++u) {
      for (Eigen::Index v = 0; v < n; ++v) {
        const double cp = positive_counts_(u, v), cn = negative_counts_(u, v);
        if (cp == 0.0 && cn == 0.0) continue;
        double slope_p = 0, slope_n = 0;
        if (cp != 0.0) loss += cp * PositiveTerm(logits(u, v), &slope_p);
        if (cn != 0.0) loss += cn * NegativeTerm(logits(u, v), &slope_n);
        if (dH) slopes(u, v) = cp * slope_p + cn * slope_n;
      }
    }
    if (dH) dH->noalias() += (slopes + slopes.transpose()) * H;
    return loss;
  }

  auto accumulate = [&](const WeightedPairs& wp, bool positive) {
    for (std::size_t i = 0; i < wp.pairs.size(); ++i) {
      const auto [u, v] = wp.pairs[i];
      const double x = H.row(u).dot(H.row(v));
      double slope = 0;
      loss += wp.counts[i] * (positive ? PositiveTerm(x, &slope) : NegativeTerm(x, &slope));
      if (dH && slope != 0.0) {
        const double c = wp.counts[i] * slope;
        dH->row(u) += c * H.row(v);
        dH->row(v) += c * H.row(u);
      }
    }
  };
  accumulate(positives_, true);
  accumulate(negatives_, false);
  return loss;
}

LossAndGrads TotalLossAndGrads(const EncoderParams& params, const NormalizedAdjacency* adjacency,
                               const PairObjective& objective, const LossConfig& cfg) {
  const ForwardPass fwd = Forward(params, adjacency);
  Matrix dH = Matrix::Zero(fwd.H.rows(), fwd.H.cols());

  LossAndGrads out;
  auto& t = out.terms;
  t.rw = objective.Evaluate(fwd.H, &dH);
  t.dis = LossDis(fwd.H, cfg.lambda_dis > 0 ? &dH : nullptr, cfg.lambda_dis);
  t.ent = EntropyReg(fwd.H, cfg.lambda_ent > 0 ? &dH : nullptr, cfg.lambda_ent);
  t.total = t.rw + cfg.lambda_dis * t.dis + cfg.lambda_ent * t.ent;
  if (!std::isfinite(t.total)) throw Error("loss is not finite");

  const Matrix dPre = dH.cwiseProduct(
      fwd.pre.unaryExpr([act = params.activation](double x) { return ActivationDerivative(act, x); }));
  out.grads.dW.noalias() = fwd.Z.transpose() * dPre;
  Matrix dZ = dPre * params.W.transpose();
  if (params.kind == EncoderKind::kGcn) {
    out.grads.dW1 = adjacency->matrix.transpose() * dZ;
  } else {
    out.grads.dW1 = std::move(dZ);
  }
  return out;
}

AdamState AdamState::ZerosLike(const EncoderParams& params) {
  AdamState s;
  s.m_W1 = Matrix::Zero(params.W1.rows(), params.W1.cols());
  s.v_W1 = s.m_W1;
  s.m_W = Matrix::Zero(params.W.rows(), params.W.cols());
  s.v_W = s.m_W;
  return s;
}

void AdamStep(EncoderParams& params, const Gradients& grads, AdamState& state, const LossConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  auto update = [&](Matrix& theta, const Matrix& g, Matrix& m, Matrix& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    theta.array() -= cfg.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + cfg.adam_eps);
  };
  update(params.W1, grads.dW1, state.m_W1, state.v_W1);
  update(params.W, grads.dW, state.m_W, state.v_W);
}

TrainResult Train(const Graph& g, const TrainOptions& options) {
  Validate(options.loss);
  const PairBatch corpus = BuildPairBatch(g, options.walk, options.threads);
  if (corpus.positives.empty()) throw Error("walk corpus produced no positive pairs");

  TrainResult result;
  result.params = InitParams(g.num_nodes(), options.kind, options.hidden_dim, options.output_dim,
                             DeriveSeed(options.loss.seed, 1), options.activation);
  std::optional<NormalizedAdjacency> adjacency;
  if (options.kind == EncoderKind::kGcn) adjacency = NormalizeAdjacency(g);
  const NormalizedAdjacency* adj = adjacency ? &*adjacency : nullptr;

  AdamState adam = AdamState::ZerosLike(result.params);
  auto step = [&](const PairObjective& objective, std::size_t epoch) {
    LossAndGrads lg;
    try {
      lg = TotalLossAndGrads(result.params, adj, objective, options.loss);
    } catch (const Error& e) {
      throw Error("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    AdamStep(result.params, lg.grads, adam, options.loss);
    return lg.terms;
  };

  const std::size_t k = options.walk.negatives_per_positive;
  if (options.loss.batch_size == 0 || options.loss.batch_size >= corpus.positives.size()) {
    const PairObjective objective(corpus, g.num_nodes());
    for (std::size_t epoch = 0; epoch < options.loss.epochs; ++epoch) {
      result.trace.push_back(step(objective, epoch));
    }
  } else {
    Rng rng(DeriveSeed(options.loss.seed, 2));
    std::vector<std::size_t> order(corpus.positives.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<NodePair> pos, neg;
    for (std::size_t epoch = 0; epoch < options.loss.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      LossTerms epoch_terms;
      std::size_t steps = 0;
      for (std::size_t begin = 0; begin < order.size(); begin += options.loss.batch_size) {
        const std::size_t end = std::min(order.size(), begin + options.loss.batch_size);
        pos.clear();
        neg.clear();
        for (std::size_t i = begin; i < end; ++i) {
          pos.push_back(corpus.positives[order[i]]);
          for (std::size_t j = 0; j < k; ++j) neg.push_back(corpus.negatives[order[i] * k + j]);
        }
        const PairObjective objective(pos, neg, g.num_nodes(), PairObjective::Layout::kSparse);
        const LossTerms t = step(objective, epoch);
        epoch_terms.total += t.total;
        epoch_terms.rw += t.rw;
        epoch_terms.dis += t.dis;
        epoch_terms.ent += t.ent;
        ++steps;
      }
      const double inv = 1.0 / static_cast<double>(steps);
      result.trace.push_back({epoch_terms.total * inv, epoch_terms.rw * inv, epoch_terms.dis * inv,
                              epoch_terms.ent * inv});
    }
  }
  result.H = Encode(result.params, adj);
  return result;
}

}  // namespace disene
