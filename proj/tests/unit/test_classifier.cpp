#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <fairgen/classifier.hpp>
#include <fairgen/errors.hpp>
#include <fairgen/generator.hpp>

#include "support/oracles.hpp"

using namespace fairgen;

namespace {

LabeledData separable_2d(std::size_t n, double margin, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  LabeledData data;
  while (data.size() < n) {
    const double x0 = u(engine), x1 = u(engine);
    if (std::abs(x0) < margin) continue;
    data.add(std::vector<double>{x0, x1}, x0 > 0 ? 1 : 0);
  }
  return data;
}

LabeledData blobs(std::size_t per_class, std::vector<std::vector<double>> centres, double spread,
                  std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> noise(0, spread);
  LabeledData data;
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < centres.size(); ++c) {
      auto x = centres[c];
      for (auto& v : x) v += noise(engine);
      data.add(x, c);
    }
  return data;
}

double binary_accuracy(const LinearModel& m, const LabeledData& data) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hit += (m.probability(data.inputs[i]) >= 0.5) == (data.labels[i] == 1);
  return double(hit) / data.size();
}

// O(n^2) pairwise AUC, independent of the rank-based implementation.
double pairwise_auc(const LinearModel& m, const LabeledData& data) {
  double wins = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != 1) continue;
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (data.labels[j] != 0) continue;
      const double a = m.logit(data.inputs[i]), b = m.logit(data.inputs[j]);
      wins += a > b ? 1.0 : a == b ? 0.5 : 0.0;
      ++pairs;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(Sigmoid, Examples) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(40.0), 1.0, 1e-12);
  EXPECT_EQ(sigmoid(700.0), 1.0);
  EXPECT_GT(sigmoid(-700.0), 0.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-700.0)));
  for (double t : {0.1, 1.0, 3.7, 20.0, 300.0}) EXPECT_NEAR(sigmoid(t) + sigmoid(-t), 1.0, 1e-15);
}

TEST(Sigmoid, Monotone) {
  double prev = 0.0;
  for (double t = -40; t <= 40; t += 0.01) {
    const double s = sigmoid(t);
    ASSERT_GE(s, prev);
    prev = s;
  }
}

TEST(LogisticLoss, MatchesReference) {
  const auto data = blobs(50, {{0, 0, 0}, {1, 1, 1}}, 0.7, 3);
  const std::vector<double> w{0.3, -0.2, 0.9};
  EXPECT_NEAR(logistic_loss(w, 0.1, data, 1e-2), fixtures::reference_loss(w, 0.1, data, 1e-2), 1e-12);
}

// Central differences with h = 1e-5 against the analytic gradient, 5 data
// sets x 10 random parameter points.
TEST(LogisticGradient, AgreesWithFiniteDifferences) {
  std::mt19937_64 engine(99);
  std::normal_distribution<double> normal;
  for (int set = 0; set < 5; ++set) {
    const std::size_t d = 2 + 3 * set;
    std::vector<std::vector<double>> centres(2, std::vector<double>(d));
    for (auto& c : centres)
      for (auto& v : c) v = normal(engine);
    const auto data = blobs(40, centres, 1.0, 100 + set);
    for (int point = 0; point < 10; ++point) {
      std::vector<double> w(d);
      for (auto& v : w) v = normal(engine);
      const double b = normal(engine);
      const auto analytic = logistic_gradient(w, b, data, 1e-4);
      const auto fd = fixtures::finite_difference_gradient(w, b, data, 1e-4, 1e-5);
      EXPECT_LT(fixtures::max_relative_error(analytic, fd, 1e-6), 1e-5) << "set " << set << " point " << point;
    }
  }
}

TEST(TrainConfig, Validation) {
  EXPECT_NO_THROW(TrainConfig{}.validate());
  EXPECT_THROW((TrainConfig{.learning_rate = 0}.validate()), ConfigError);
  EXPECT_THROW((TrainConfig{.validation_fraction = 0.5}.validate()), ConfigError);
  EXPECT_THROW((TrainConfig{.validation_fraction = 0.0}.validate()), ConfigError);
  EXPECT_THROW((TrainConfig{.batch_size = 0}.validate()), ConfigError);
}

TEST(TrainBinary, SeparableTwoD) {
  const auto data = separable_2d(1000, 0.1, 1);
  const auto model = train_binary(data, Space::feature, TrainConfig{});
  EXPECT_GE(binary_accuracy(model, data), 0.99);
  EXPECT_LT(model.meta.final_train_loss, model.meta.initial_loss);
  EXPECT_EQ(model.space, Space::feature);
  EXPECT_EQ(model.positive_class, 1u);
}

TEST(TrainBinary, SingleClassIsDegenerate) {
  LabeledData data;
  for (int i = 0; i < 10; ++i) data.add(std::vector<double>{double(i)}, 0);
  EXPECT_THROW(train_binary(data, Space::feature, TrainConfig{}), DegenerateTrainingError);
}

TEST(TrainBinary, RaggedInputThrows) {
  LabeledData data;
  data.add(std::vector<double>{1, 2}, 0);
  data.add(std::vector<double>{1}, 1);
  EXPECT_THROW(train_binary(data, Space::feature, TrainConfig{}), DimensionMismatchError);
}

TEST(TrainBinary, DeterministicForFixedSeed) {
  const auto data = blobs(200, {{0, 0}, {1, 0.5}}, 0.8, 5);
  const TrainConfig cfg{.max_epochs = 10, .seed = 77};
  EXPECT_EQ(train_binary(data, Space::latent, cfg), train_binary(data, Space::latent, cfg));
  auto other = cfg;
  other.seed = 78;
  EXPECT_NE(train_binary(data, Space::latent, cfg).weights, train_binary(data, Space::latent, other).weights);
}

// Overlapping classes with a large step make validation loss turn up quickly.
TEST(TrainBinary, EarlyStoppingBookkeeping) {
  const auto data = blobs(100, {{0, 0}, {1, 1}}, 1.0, 8);
  const TrainConfig cfg{.learning_rate = 0.5, .max_epochs = 200, .early_stop_patience = 3, .l2_penalty = 0, .seed = 1};
  const auto m = train_binary(data, Space::feature, cfg);
  const auto& losses = m.meta.validation_losses;
  ASSERT_EQ(losses.size(), m.meta.epochs_run);
  EXPECT_LE(m.meta.epochs_run, cfg.max_epochs);
  ASSERT_TRUE(m.meta.stopped_early);
  const double best = *std::min_element(losses.begin(), losses.end());
  EXPECT_EQ(losses[m.meta.best_epoch - 1], best);
  for (std::size_t i = losses.size() - cfg.early_stop_patience; i < losses.size(); ++i) EXPECT_GE(losses[i], best);
  EXPECT_NEAR(m.meta.final_validation_loss, best, 1e-12);
}

TEST(TrainBinary, FinalLossBelowInitialAtDefaults) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = blobs(150, {{0, 0, 0}, {0.5, -0.5, 1}}, 1.0 + 0.3 * seed, seed);
    const auto m = train_binary(data, Space::feature, TrainConfig{.seed = seed});
    EXPECT_LT(m.meta.final_train_loss, m.meta.initial_loss) << "seed " << seed;
    EXPECT_LE(m.meta.epochs_run, 50u);
  }
}

TEST(TrainOvr, BalancedBlobsK2) {
  const auto data = blobs(300, {{-2, 0}, {2, 0}}, 0.7, 4);
  const auto models = train_ovr(data, GroupSet({"a", "b"}), Space::feature, TrainConfig{});
  ASSERT_EQ(models.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(models[k].positive_class, k);
    LabeledData binary;
    for (std::size_t i = 0; i < data.size(); ++i) binary.add(data.inputs[i], data.labels[i] == k);
    EXPECT_GE(binary_accuracy(models[k], binary), 0.95) << "model " << k;
  }
}

TEST(TrainOvr, MissingGroupIsNamed) {
  const auto data = blobs(20, {{0}, {1}, {2}}, 0.1, 1);
  try {
    train_ovr(data, GroupSet::defaults(5), Space::feature, TrainConfig{});
    FAIL();
  } catch (const MissingGroupError& e) {
    EXPECT_EQ(e.group(), 3u);
    EXPECT_NE(std::string(e.what()).find("White"), std::string::npos);
  }
}

TEST(TrainOvr, ModelSeedsAreOffsetByGroup) {
  const auto data = blobs(50, {{0, 0}, {2, 2}, {-2, 2}}, 0.5, 2);
  const auto models = train_ovr(data, GroupSet({"a", "b", "c"}), Space::feature, TrainConfig{.max_epochs = 3, .seed = 10});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(models[k].meta.seed, 10 + k);
}

// 5,000 oracle-labelled latents: each probe separates its group with AUC > 0.9
// on fresh held-out latents.
TEST(TrainOvr, OracleLatentProbesHaveHighAuc) {
  Oracle oracle{OracleConfig{}};
  const auto train = fixtures::oracle_sample(oracle, 5000, 31);
  const auto held = fixtures::oracle_sample(oracle, 2000, 32);
  const auto probes = train_ovr(train.latents, GroupSet::defaults(5), Space::latent, TrainConfig{.seed = 31});
  for (std::size_t k = 0; k < 5; ++k) {
    LabeledData binary;
    for (std::size_t i = 0; i < held.latents.size(); ++i) binary.add(held.latents.inputs[i], held.latents.labels[i] == k);
    const double auc = roc_auc(probes[k], binary);
    EXPECT_GT(auc, 0.9) << "group " << k;
    EXPECT_NEAR(auc, pairwise_auc(probes[k], binary), 1e-12);
  }
}

TEST(PredictGroup, SingleModel) {
  const LinearModel m{.weights = {1.0}, .bias = 0.5};
  const std::vector<LinearModel> models{m};
  const auto p = predict_group(models, std::vector<double>{-3.0});
  EXPECT_EQ(p.group, 0u);
  EXPECT_DOUBLE_EQ(p.confidence, sigmoid(-2.5));
}

TEST(PredictGroup, IdenticalModelsTieToZero) {
  const LinearModel m{.weights = {1.0, 2.0}, .bias = 0.1};
  const std::vector<LinearModel> models{m, m, m};
  EXPECT_EQ(predict_group(models, std::vector<double>{0.3, -0.2}).group, 0u);
}

TEST(PredictGroup, HandBuilt) {
  const std::vector<LinearModel> models{{.weights = {1, 0}, .positive_class = 0}, {.weights = {0, 1}, .positive_class = 1}};
  const auto p = predict_group(models, std::vector<double>{2, 1});
  EXPECT_EQ(p.group, 0u);
  EXPECT_DOUBLE_EQ(p.confidence, sigmoid(2.0));
}

TEST(PredictGroup, ErrorsOnMixedInputs) {
  const std::vector<LinearModel> mixed{{.weights = {1}, .space = Space::feature}, {.weights = {1}, .space = Space::latent}};
  EXPECT_THROW(predict_group(mixed, std::vector<double>{1}), WrongSpaceError);
  const std::vector<LinearModel> models{{.weights = {1, 0}}};
  EXPECT_THROW(predict_group(models, std::vector<double>{1}), DimensionMismatchError);
  EXPECT_THROW(predict_group(std::span<const LinearModel>{}, std::vector<double>{1}), Error);
}

TEST(PredictGroup, InvariantUnderSharedPositiveRescale) {
  std::mt19937_64 engine(12);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.01, 100);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<LinearModel> models(4), scaled(4);
    for (std::size_t k = 0; k < 4; ++k) {
      models[k].weights = {normal(engine), normal(engine), normal(engine)};
      models[k].bias = normal(engine);
    }
    const double c = scale(engine);
    for (std::size_t k = 0; k < 4; ++k) {
      scaled[k] = models[k];
      for (auto& w : scaled[k].weights) w *= c;
      scaled[k].bias *= c;
    }
    const std::vector<double> x{normal(engine), normal(engine), normal(engine)};
    EXPECT_EQ(predict_group(models, x).group, predict_group(scaled, x).group);
  }
}

TEST(Accuracy, CountsMatches) {
  const std::vector<LinearModel> models{{.weights = {1}}, {.weights = {-1}}};
  LabeledData data;
  data.add(std::vector<double>{1}, 0);
  data.add(std::vector<double>{-1}, 1);
  data.add(std::vector<double>{2}, 1);
  data.add(std::vector<double>{-2}, 0);
  EXPECT_DOUBLE_EQ(accuracy(models, data), 0.5);
}

TEST(RocAuc, TiesCountHalf) {
  const LinearModel flat{.weights = {0.0}};
  LabeledData data;
  for (int i = 0; i < 5; ++i) data.add(std::vector<double>{double(i)}, i % 2);
  EXPECT_DOUBLE_EQ(roc_auc(flat, data), 0.5);
  const LinearModel up{.weights = {1.0}};
  LabeledData sorted;
  for (int i = 0; i < 6; ++i) sorted.add(std::vector<double>{double(i)}, i >= 3);
  EXPECT_DOUBLE_EQ(roc_auc(up, sorted), 1.0);
}

TEST(Space, StringRoundTrip) {
  EXPECT_EQ(space_from_string(to_string(Space::latent)), Space::latent);
  EXPECT_EQ(space_from_string("feature"), Space::feature);
  EXPECT_THROW(space_from_string("pixel"), ConfigError);
}
