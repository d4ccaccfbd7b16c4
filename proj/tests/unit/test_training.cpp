#include <gtest/gtest.h>

#include <cmath>

#include "../common/gradcheck.hpp"
#include "disene/synth.hpp"
#include "disene/training.hpp"
#include "test_util.hpp"

namespace disene {
namespace {

using testing::RandomConnectedGraph;
using testing::RandomMatrix;

double BruteCosineLoss(const Matrix& H) {
  const Eigen::Index k = H.cols();
  Vector S = Vector::Zero(k);
  for (Eigen::Index v = 0; v < H.rows(); ++v)
    for (Eigen::Index d = 0; d < k; ++d) S[d] += H(v, d);
  double loss = 0;
  for (Eigen::Index d = 0; d < k; ++d) {
    for (Eigen::Index l = 0; l < k; ++l) {
      if (d == l) continue;
      double dot = 0, nd = 0, nl = 0;
      for (Eigen::Index v = 0; v < H.rows(); ++v) {
        const double a = S[d] * H(v, d), b = S[l] * H(v, l);
        dot += a * b;
        nd += a * a;
        nl += b * b;
      }
      loss += dot / (std::sqrt(nd) * std::sqrt(nl) + kCosineEps);
    }
  }
  return loss;
}

TEST(LossRw, Examples) {
  PairBatch batch{{{0, 1}}, {{1, 0}}};
  EXPECT_NEAR(LossRw(Matrix::Zero(2, 3), batch), 2 * std::log(2.0), 1e-12);
  EXPECT_NEAR(2 * std::log(2.0), 1.38629, 5e-6);

  PairBatch pos{{{0, 1}}, {}};
  const Matrix H = Matrix::Ones(2, 4);
  EXPECT_NEAR(LossRw(H, pos), 0.01815, 5e-6);

  PairBatch extra = pos;
  extra.negatives.push_back({0, 1});
  Matrix Z = Matrix::Ones(3, 4);
  Z.row(2).setZero();
  extra.negatives.back() = {2, 1};
  EXPECT_NEAR(LossRw(Z, extra) - LossRw(Z, pos), std::log(2.0), 1e-12);
}

TEST(LossRw, ObjectiveLayoutsAgree) {
  const Graph g = RandomConnectedGraph(30, 40, 1);
  WalkConfig walk;
  walk.walk_length = 10;
  walk.num_walks = 3;
  const auto batch = BuildPairBatch(g, walk);
  const Matrix H = RandomMatrix(30, 4, 2, 0.0, 0.8);
  const double direct = LossRw(H, batch);
  Matrix g_dense = Matrix::Zero(30, 4), g_sparse = Matrix::Zero(30, 4);
  const PairObjective dense(batch, 30, PairObjective::Layout::kDense);
  const PairObjective sparse(batch, 30, PairObjective::Layout::kSparse);
  EXPECT_NEAR(dense.Evaluate(H, &g_dense), direct, 1e-9 * direct);
  EXPECT_NEAR(sparse.Evaluate(H, &g_sparse), direct, 1e-9 * direct);
  EXPECT_LT((g_dense - g_sparse).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ColumnStats, Examples) {
  EXPECT_EQ(AffiliationColumnStats(Matrix::Ones(3, 2)), Vector::Constant(2, 3.0));
  Matrix H = RandomMatrix(4, 2, 3);
  H.col(1).setZero();
  const Vector S = AffiliationColumnStats(H);
  EXPECT_NEAR(S[0], H(0, 0) + H(1, 0) + H(2, 0) + H(3, 0), 1e-15);
  EXPECT_EQ(S[1], 0.0);
}

TEST(LossDis, Examples) {
  Matrix orth(4, 2);
  orth << 1, 0, 2, 0, 0, 3, 0, 1;
  EXPECT_NEAR(LossDis(orth), 0.0, 1e-15);
  Matrix same(3, 2);
  same << 1, 1, 2, 2, 0.5, 0.5;
  EXPECT_NEAR(LossDis(same), 2.0, 1e-9);
  EXPECT_EQ(LossDis(Matrix::Ones(5, 1)), 0.0);
}

TEST(LossDis, MatchesBruteForceAndRange) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix H = RandomMatrix(5, 3, seed);
    const double loss = LossDis(H);
    EXPECT_NEAR(loss, BruteCosineLoss(H), 1e-12);
    EXPECT_GE(loss, 0.0);
    EXPECT_LE(loss, 6.0 + 1e-12);
  }
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(EntropyReg(Matrix::Ones(4, 3)), 0.0, 1e-12);
  Matrix one = Matrix::Zero(4, 3);
  one.col(1).setOnes();
  EXPECT_NEAR(EntropyReg(one), 1.0, 1e-12);
  Matrix skew(2, 2);
  skew << 0.5, 0.25, 0.25, 0.0;
  EXPECT_NEAR(EntropyReg(skew), 0.18872, 5e-6);
  EXPECT_EQ(EntropyReg(Matrix::Zero(3, 3)), 1.0);
}

TEST(Entropy, InUnitInterval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Matrix H = RandomMatrix(6, 5, seed);
    H.col(seed % 5).setZero();
    const double p = EntropyReg(H);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

// Regularizer gradients on H alone, against central differences.
TEST(Gradients, RegularizersOnH) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix H = RandomMatrix(6, 4, seed, 0.1, 1.0);
    for (int which = 0; which < 2; ++which) {
      auto f = [&](const Matrix& X, Matrix* d) { return which == 0 ? LossDis(X, d) : EntropyReg(X, d); };
      Matrix dH = Matrix::Zero(6, 4);
      f(H, &dH);
      for (Eigen::Index i = 0; i < H.size(); ++i) {
        const double saved = H.data()[i];
        H.data()[i] = saved + 1e-6;
        const double up = f(H, nullptr);
        H.data()[i] = saved - 1e-6;
        const double down = f(H, nullptr);
        H.data()[i] = saved;
        EXPECT_NEAR(dH.data()[i], (up - down) / 2e-6, 1e-6);
      }
    }
  }
}

TEST(Gradients, DisAtOrthogonalColumns) {
  Matrix H(4, 2);
  H << 1, 0, 2, 0, 0, 3, 0, 1;
  Matrix dH = Matrix::Zero(4, 2);
  LossDis(H, &dH);
  for (Eigen::Index i = 0; i < H.size(); ++i) {
    Matrix up = H, down = H;
    up.data()[i] += 1e-6;
    down.data()[i] -= 1e-6;
    EXPECT_NEAR(dH.data()[i], (LossDis(up) - LossDis(down)) / 2e-6, 1e-6);
  }
}

class FullGradient : public ::testing::TestWithParam<std::tuple<EncoderKind, PairObjective::Layout>> {};

TEST_P(FullGradient, MatchesCentralDifferences) {
  const auto [kind, layout] = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = RandomConnectedGraph(20, 15, seed);
    WalkConfig walk;
    walk.walk_length = 8;
    walk.num_walks = 2;
    walk.window = 3;
    walk.seed = seed;
    const auto batch = BuildPairBatch(g, walk);
    const PairObjective objective(batch, 20, layout);
    const auto adj = NormalizeAdjacency(g);
    const auto params = InitParams(20, kind, 4, 4, seed + 100);
    LossConfig cfg;
    const auto r = testing::CheckGradients(params, kind == EncoderKind::kGcn ? &adj : nullptr, objective, cfg);
    EXPECT_LT(r.relative_error(), 1e-4) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(Encoders, FullGradient,
                         ::testing::Combine(::testing::Values(EncoderKind::kFc, EncoderKind::kGcn),
                                            ::testing::Values(PairObjective::Layout::kDense,
                                                              PairObjective::Layout::kSparse)));

TEST(Gradients, AblationIsPlainSkipGram) {
  const Graph g = RandomConnectedGraph(15, 10, 4);
  const auto batch = BuildPairBatch(g, WalkConfig{});
  const PairObjective objective(batch, 15);
  const auto params = InitParams(15, EncoderKind::kFc, 4, 3, 9);
  LossConfig cfg;
  cfg.lambda_dis = cfg.lambda_ent = 0;
  const auto lg = TotalLossAndGrads(params, nullptr, objective, cfg);
  const auto fwd = Forward(params, nullptr);
  Matrix dH = Matrix::Zero(15, 3);
  const double rw = objective.Evaluate(fwd.H, &dH);
  EXPECT_DOUBLE_EQ(lg.terms.total, rw);
  const Matrix dPre = dH.cwiseProduct((fwd.pre.array() > 0).cast<double>().matrix());
  EXPECT_LT((lg.grads.dW - params.W1.transpose() * dPre).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  EncoderParams p;
  p.W1 = Matrix::Constant(1, 1, 1.0);
  p.W = Matrix::Constant(1, 1, 1.0);
  LossConfig cfg;
  auto state = AdamState::ZerosLike(p);
  AdamStep(p, {Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, -0.2)}, state, cfg);
  EXPECT_NEAR(p.W1(0, 0), 1.0 - 0.01, 1e-8);
  EXPECT_NEAR(p.W(0, 0), 1.0 + 0.01, 1e-7);
}

TEST(Adam, ZeroGradientLeavesParams) {
  auto p = InitParams(3, EncoderKind::kFc, 2, 2, 1);
  const auto before = p;
  auto state = AdamState::ZerosLike(p);
  AdamStep(p, {Matrix::Zero(3, 2), Matrix::Zero(2, 2)}, state, LossConfig{});
  EXPECT_EQ(p.W1, before.W1);
  EXPECT_EQ(p.W, before.W);
}

TEST(Adam, TwoStepsMatchReference) {
  // f(x) = x^2 from x = 2, gradients 2x.
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double x = 2, m = 0, v = 0;
  EncoderParams p;
  p.W1 = Matrix::Constant(1, 1, 2.0);
  p.W = Matrix::Zero(1, 1);
  auto state = AdamState::ZerosLike(p);
  for (int t = 1; t <= 2; ++t) {
    const double grad = 2 * x;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad * grad;
    x -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    AdamStep(p, {Matrix::Constant(1, 1, 2 * p.W1(0, 0)), Matrix::Zero(1, 1)}, state, LossConfig{});
    EXPECT_NEAR(p.W1(0, 0), x, 1e-15);
  }
}

TrainOptions SmallOptions(EncoderKind kind) {
  TrainOptions o;
  o.kind = kind;
  o.hidden_dim = 16;
  o.output_dim = 8;
  o.walk.num_walks = 4;
  o.walk.walk_length = 20;
  o.loss.seed = 3;
  o.walk.seed = 4;
  return o;
}

TEST(Train, DeterministicGivenSeeds) {
  const Graph g = RandomConnectedGraph(40, 40, 2);
  for (EncoderKind kind : {EncoderKind::kFc, EncoderKind::kGcn}) {
    const auto a = Train(g, SmallOptions(kind));
    const auto b = Train(g, SmallOptions(kind));
    EXPECT_EQ(a.H, b.H);
    ASSERT_EQ(a.trace.size(), 50u);
    EXPECT_GE(a.H.minCoeff(), 0.0);
  }
}

TEST(Train, MinibatchesRunAndAreDeterministic) {
  const Graph g = RandomConnectedGraph(40, 40, 2);
  auto o = SmallOptions(EncoderKind::kFc);
  o.loss.batch_size = 100;
  o.loss.epochs = 3;
  const auto a = Train(g, o);
  EXPECT_EQ(a.H, Train(g, o).H);
  EXPECT_EQ(a.trace.size(), 3u);
}

TEST(Train, RingLossTrendsDown) {
  const auto data = GenerateSynthetic(DefaultSpec(SynthKind::kRingCliques));
  TrainOptions o;
  o.output_dim = 32;
  o.loss.seed = 1;
  o.walk.seed = 2;
  const auto r = Train(data.graph, o);
  for (std::size_t e = 1; e < r.trace.size(); ++e) {
    EXPECT_LE(r.trace[e].total, r.trace[e - 1].total * 1.05) << "epoch " << e;
  }
  EXPECT_LT(r.trace.back().total, r.trace.front().total);
  // The regularized run separates dimensions more than the plain skip-gram.
  o.loss.lambda_dis = o.loss.lambda_ent = 0;
  const auto base = Train(data.graph, o);
  EXPECT_LT(LossDis(r.H), LossDis(base.H));
}

TEST(LossConfig, Validation) {
  LossConfig cfg;
  cfg.lambda_dis = -1;
  EXPECT_THROW(Validate(cfg), Error);
  cfg = LossConfig{};
  cfg.epochs = 0;
  EXPECT_THROW(Validate(cfg), Error);
}

}  // namespace
}  // namespace disene
