#pragma once

#include <span>
#include <vector>

#include "disene/model.hpp"
#include "disene/sampling.hpp"

namespace disene {

struct LossConfig {
  double lambda_ent = 1.0;
  double lambda_dis = 1.0;
  std::size_t epochs = 50;
  double learning_rate = 0.01;
  std::size_t batch_size = 0;  // positives per step; 0 = whole corpus
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

void Validate(const LossConfig& cfg);

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
inline constexpr double kProbClamp = 1e-7;
inline constexpr double kCosineEps = 1e-12;
inline constexpr double kMassEps = 1e-12;

// -sum_pos log sigma(h(u).h(v)) - sum_neg log sigma(-h(u').h(v)), one term per
// listed pair. Straight loop over the batch; PairObjective is the fast path.
double LossRw(const Matrix& H, const PairBatch& batch);

// S_d = sum_u h_d(u). The affiliation column F_{:,d} is approximated by S_d * H_{:,d}.
Vector AffiliationColumnStats(const Matrix& H);

// sum_{d != l} cos(F_{:,d}, F_{:,l}) with F = H diag(S). Zero for K < 2.
// When dH is given the gradient (times `scale`) is added to it.
double LossDis(const Matrix& H, Matrix* dH = nullptr, double scale = 1.0);

// 1 - entropy(p) / log K with p_d = S_d / sum_l S_l; 1 when the total mass
// is below kMassEps, 0 when K = 1. Negative column sums count as zero mass.
double EntropyReg(const Matrix& H, Matrix* dH = nullptr, double scale = 1.0);

// Skip-gram loss over aggregated pair counts. Duplicate pairs are merged into
// weights; a dense V x V layout is used for small graphs.
class PairObjective {
 public:
  enum class Layout { kAuto, kSparse, kDense };
  static constexpr std::size_t kDenseNodeLimit = 2048;

  PairObjective(std::span<const NodePair> positives, std::span<const NodePair> negatives,
                std::size_t num_nodes, Layout layout = Layout::kAuto);
  PairObjective(const PairBatch& batch, std::size_t num_nodes, Layout layout = Layout::kAuto)
      : PairObjective(batch.positives, batch.negatives, num_nodes, layout) {}

  // Loss value; adds dLoss/dH into *dH when given.
  double Evaluate(const Matrix& H, Matrix* dH) const;
  Layout layout() const { return layout_; }

 private:
  struct WeightedPairs {
    std::vector<NodePair> pairs;
    std::vector<double> counts;
  };
  static WeightedPairs Aggregate(std::span<const NodePair> pairs);

  std::size_t num_nodes_;
  Layout layout_;
  WeightedPairs positives_, negatives_;
  Matrix positive_counts_, negative_counts_;  // dense layout only
};

struct LossTerms {
  double total = 0;
  double rw = 0;
  double dis = 0;
  double ent = 0;
};

struct Gradients {
  Matrix dW1;
  Matrix dW;
};

struct LossAndGrads {
  LossTerms terms;
  Gradients grads;
};

// L = L_rw + lambda_dis * L_dis + lambda_ent * entropy penalty, with the
// regularizers on the full-graph H and analytic gradients for W1 and W.
LossAndGrads TotalLossAndGrads(const EncoderParams& params, const NormalizedAdjacency* adjacency,
                               const PairObjective& objective, const LossConfig& cfg);

struct AdamState {
  Matrix m_W1, v_W1, m_W, v_W;
  std::size_t step = 0;

  static AdamState ZerosLike(const EncoderParams& params);
};

void AdamStep(EncoderParams& params, const Gradients& grads, AdamState& state, const LossConfig& cfg);

struct TrainOptions {
  EncoderKind kind = EncoderKind::kFc;
  Activation activation = Activation::kRelu;
  std::size_t hidden_dim = 128;
  std::size_t output_dim = 32;
  LossConfig loss;
  WalkConfig walk;
  int threads = 1;
};

struct TrainResult {
  EncoderParams params;
  Matrix H;
  std::vector<LossTerms> trace;  // one entry per epoch
};

// Builds the walk corpus once, then runs `epochs` passes of Adam. Throws
// Error when the loss becomes non-finite.
TrainResult Train(const Graph& g, const TrainOptions& options);

}  // namespace disene
