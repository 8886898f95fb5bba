#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles/finite_difference.hpp"
#include "oracles/high_precision.hpp"
#include "vdir/objective.hpp"
#include "vdir/specfn.hpp"

using vdir::ConcentrationVector;
using vdir::ModelParams;
using vdir::PriorKind;
using vdir::PriorSpec;
using vdir::TrainConfig;
namespace obj = vdir::objective;

namespace {

double data_term_loss(const ModelParams& p, const std::vector<double>& x, std::size_t y) {
  auto a = vdir::net::forward(p, x).alpha;
  return -(vdir::specfn::digamma(a[y]) - vdir::specfn::digamma(a.alpha0()));
}

std::vector<double> flatten(const ModelParams& p) {
  std::vector<double> out;
  for (auto t : p.tensors()) out.insert(out.end(), t.begin(), t.end());
  return out;
}

ModelParams unflatten(ModelParams shape, const std::vector<double>& v) {
  std::size_t k = 0;
  for (auto t : shape.tensors())
    for (double& x : t) x = v[k++];
  return shape;
}

struct OwnedBatch {
  std::vector<std::vector<double>> rows;
  obj::Batch view;
};

OwnedBatch random_batch(vdir::SeededRng& rng, std::size_t n, std::size_t d, std::size_t k) {
  OwnedBatch b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    b.rows.push_back(std::move(x));
    b.view.labels.push_back(static_cast<std::size_t>(rng.index(k)));
  }
  for (const auto& r : b.rows) b.view.inputs.emplace_back(r);
  return b;
}

}  // namespace

TEST(MakePrior, DefinitionalCopies) {
  EXPECT_EQ(obj::make_prior({PriorKind::Uniform}, {4, 5, 6}).vector(), (std::vector{1.0, 1.0, 1.0}));
  EXPECT_EQ(obj::make_prior({PriorKind::GroundtruthPreserving}, {5, 2, 2}, 0).vector(), (std::vector{5.0, 1.0, 1.0}));
  EXPECT_EQ(obj::make_prior({PriorKind::PredictionPreserving}, {2, 7, 2}).vector(), (std::vector{1.0, 7.0, 1.0}));
}

TEST(MakePrior, GroundtruthNeedsLabel) {
  EXPECT_THROW(obj::make_prior({PriorKind::GroundtruthPreserving}, {5, 2, 2}), vdir::ConfigError);
  EXPECT_THROW(obj::make_prior({PriorKind::GroundtruthPreserving}, {5, 2, 2}, 3), vdir::DimensionError);
}

TEST(Elbo, KnownValues) {
  EXPECT_NEAR(obj::elbo({1, 1, 1}, 0, {PriorKind::Uniform}, 1.0).value, -1.5, 1e-12);
  // 50-digit evaluations of the closed form: -ln 3 and -5/6
  EXPECT_NEAR(obj::elbo({2, 1, 1}, 0, {PriorKind::Uniform}, 1.0).value,
              static_cast<double>(oracle::elbo({2, 1, 1}, 0, {1, 1, 1}, 1.0)), 1e-12);
  EXPECT_NEAR(obj::elbo({2, 1, 1}, 0, {PriorKind::Uniform}, 1.0).value, -1.09861, 1e-5);
  EXPECT_NEAR(obj::elbo({2, 1, 1}, 0, {PriorKind::GroundtruthPreserving}, 1.0).value, -0.83333, 1e-5);
}

TEST(Elbo, GroundtruthPriorVanishesWhenOnlyLabelDeviates) {
  vdir::SeededRng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(4, 1.0);
    const std::size_t y = rng.index(4);
    a[y] = rng.uniform(0.2, 30.0);
    EXPECT_NEAR(obj::elbo(ConcentrationVector(a), y, {PriorKind::GroundtruthPreserving}, 1.0).kl, 0.0, 1e-12);
  }
}

TEST(Elbo, GradientMatchesFiniteDifferencesForEveryPrior) {
  vdir::SeededRng rng(2);
  for (auto kind : {PriorKind::Uniform, PriorKind::GroundtruthPreserving, PriorKind::PredictionPreserving}) {
    for (int t = 0; t < 30; ++t) {
      const std::size_t k = 2 + rng.index(6);
      std::vector<double> a(k);
      for (double& v : a) v = rng.uniform(0.2, 30.0);
      const std::size_t y = rng.index(k);
      const double eta = rng.uniform(0.01, 2.0);
      const ConcentrationVector alpha(a);
      const auto prior = obj::make_prior({kind}, alpha, y);
      auto f = [&](const std::vector<double>& x) { return obj::elbo_with_prior(ConcentrationVector(x), y, prior, eta).value; };
      EXPECT_LE(oracle::max_rel_error(obj::elbo(alpha, y, {kind}, eta).grad, oracle::central_difference(f, a)), 1e-5);
    }
  }
}

TEST(Fgsm, ZeroEpsilonLeavesInputUnchanged) {
  auto p = vdir::init({3, 8, 3}, 1);
  const std::vector<double> x{0.5, -1.0, 2.0};
  EXPECT_EQ(obj::fgsm(p, x, 1, 0.0), x);
}

TEST(Fgsm, SignsFollowTheLossGradient) {
  ModelParams p;
  p.layers.emplace_back(3, 3);
  p.layers[0].weight = {0.8, -0.3, 0.1, -0.5, 0.9, 0.4, 0.2, 0.6, -0.7};
  p.layers[0].bias = {0.1, 0.0, -0.1};
  const std::vector<double> x{0.2, -0.4, 0.7};
  const std::size_t y = 1;
  const auto fd = oracle::central_difference([&](const std::vector<double>& xx) { return data_term_loss(p, xx, y); }, x);

  const auto up = obj::fgsm(p, x, y, 0.2, vdir::FgsmDirection::Ascend);
  const auto down = obj::fgsm(p, x, y, 0.2, vdir::FgsmDirection::Descend);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_GT(std::abs(fd[i]), 1e-6);
    EXPECT_DOUBLE_EQ(up[i] - x[i], 0.2 * obj::sign(fd[i]));
    EXPECT_DOUBLE_EQ(down[i] - x[i], -0.2 * obj::sign(fd[i]));
  }
  EXPECT_GT(data_term_loss(p, up, y), data_term_loss(p, x, y));
}

TEST(Fgsm, DefaultMagnitude) {
  EXPECT_EQ(TrainConfig::reference().epsilon_fgsm, 0.2);
}

TEST(Fgsm, ZeroGradientComponentIsNotMoved) {
  // The second input has no path to the output.
  ModelParams p;
  p.layers.emplace_back(2, 2);
  p.layers[0].weight = {1.0, 0.0, -1.0, 0.0};
  auto out = obj::fgsm(p, std::vector{0.3, 0.3}, 0, 0.5);
  EXPECT_EQ(out[1], 0.3);
  EXPECT_NE(out[0], 0.3);
}

TEST(Discriminative, Examples) {
  EXPECT_EQ(obj::discriminative({2, 3, 4}, {2, 3, 4}).value, 0.0);
  auto d = obj::discriminative({1, 1, 1}, {1, 1, 1});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(d.grad_clean[i], -d.grad_adv[i]);
}

TEST(Discriminative, IsConfidenceGap) {
  // C = -H; pick alphas whose confidences are known in closed form.
  const double c_clean = -vdir::dirichlet::entropy({2, 2}).value;  // 0.12509...
  const double c_adv = -vdir::dirichlet::entropy({1, 1}).value;    // 0
  EXPECT_NEAR(obj::discriminative({2, 2}, {1, 1}).value, c_clean - c_adv, 1e-15);
}

TEST(Discriminative, AntisymmetricUnderSwap) {
  vdir::SeededRng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(4), b(4);
    for (double& v : a) v = rng.uniform(0.1, 20.0);
    for (double& v : b) v = rng.uniform(0.1, 20.0);
    EXPECT_EQ(obj::discriminative(ConcentrationVector(a), ConcentrationVector(b)).value,
              -obj::discriminative(ConcentrationVector(b), ConcentrationVector(a)).value);
  }
}

TEST(TotalLoss, LambdaZeroIsNegativeMeanElbo) {
  vdir::SeededRng rng(4);
  auto p = vdir::init({3, 8, 3}, 5);
  auto b = random_batch(rng, 7, 3, 3);
  TrainConfig cfg = TrainConfig::desk();
  cfg.lambda = 0.0;
  auto loss = obj::total_loss(b.view, p, cfg);
  double sum = 0.0;
  for (std::size_t i = 0; i < b.view.size(); ++i) {
    auto a = vdir::net::forward(p, b.rows[i]).alpha;
    sum += obj::elbo(a, b.view.labels[i], {cfg.prior}, cfg.eta).value;
  }
  EXPECT_EQ(loss.breakdown.total, -loss.breakdown.elbo_term);
  EXPECT_NEAR(loss.breakdown.total, -sum / 7.0, 1e-14);
  EXPECT_TRUE(loss.breakdown.grad_alpha_adv.empty());
}

TEST(TotalLoss, DefaultBalancingFactor) { EXPECT_EQ(TrainConfig::reference().lambda, 0.1); }

TEST(TotalLoss, TotalIsTheSumOfItsParts) {
  vdir::SeededRng rng(6);
  auto p = vdir::init({4, 16, 3}, 6);
  for (double lambda : {0.001, 0.1, 5.0}) {
    auto b = random_batch(rng, 9, 4, 3);
    TrainConfig cfg = TrainConfig::desk();
    cfg.lambda = lambda;
    auto loss = obj::total_loss(b.view, p, cfg);
    const auto& br = loss.breakdown;
    EXPECT_NEAR(br.total, -br.elbo_term - lambda * br.discriminative_term, 1e-12);
  }
}

TEST(TotalLoss, EmptyBatchIsAnError) {
  auto p = vdir::init({2, 3}, 1);
  EXPECT_THROW(obj::total_loss(obj::Batch{}, p, TrainConfig::desk()), vdir::ConfigError);
}

TEST(TotalLoss, EndToEndGradientMatchesFiniteDifferences) {
  vdir::SeededRng rng(7);
  for (auto kind : {PriorKind::Uniform, PriorKind::GroundtruthPreserving, PriorKind::PredictionPreserving}) {
    for (int trial = 0; trial < 3; ++trial) {
      const std::size_t d = 2 + rng.index(3), k = 2 + rng.index(3);
      auto p = vdir::init({d, 6, k}, rng.next_u64());
      auto b = random_batch(rng, 4, d, k);
      TrainConfig cfg = TrainConfig::desk();
      cfg.prior = kind;
      cfg.eta = 0.7;
      cfg.lambda = 0.3;
      cfg.epsilon_fgsm = 0.25;

      auto ref = obj::total_loss(b.view, p, cfg);
      // Adversarial inputs and priors held fixed: sign() and the prior copy
      // are constants of the gradient.
      auto f = [&](const std::vector<double>& flat) {
        return obj::total_loss(b.view, unflatten(p, flat), cfg, &ref.frozen).breakdown.total;
      };
      auto fd = oracle::central_difference(f, flatten(p));
      EXPECT_LE(oracle::max_rel_error(flatten(ref.grad), fd, 1e-6), 1e-4) << vdir::to_string(kind);
    }
  }
}

TEST(TotalLoss, BitIdenticalAcrossThreadCounts) {
  vdir::SeededRng rng(8);
  auto p = vdir::init({5, 16, 16, 4}, 9);
  auto b = random_batch(rng, 33, 5, 4);
  const auto cfg = TrainConfig::desk();
  auto one = obj::total_loss(b.view, p, cfg, nullptr, 1);
  for (int t : {2, 3, 8}) {
    auto many = obj::total_loss(b.view, p, cfg, nullptr, t);
    EXPECT_EQ(one.breakdown.total, many.breakdown.total);
    EXPECT_EQ(one.grad, many.grad);
  }
}
