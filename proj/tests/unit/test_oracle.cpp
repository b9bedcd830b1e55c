#include <cmath>

#include <gtest/gtest.h>

#include <fairgen/errors.hpp>
#include <fairgen/generator.hpp>

#include "support/oracles.hpp"

using namespace fairgen;

namespace {

// d=2, K=2, W = I, hand-checkable.
Oracle tiny_oracle(std::vector<double> bias) {
  OracleConfig cfg{.latent_dim = 2, .feature_dim = 2, .group_count = bias.size(), .skew_bias = 0.0, .majority_group = 0};
  GroundTruth t;
  t.group_directions = Matrix(bias.size(), 2);
  for (std::size_t k = 0; k < bias.size(); ++k) t.group_directions(k, k % 2) = 1.0;
  t.group_bias = std::move(bias);
  t.mixing = Matrix(2, 2, {1, 0, 0, 1});
  return Oracle(cfg, std::move(t));
}

}  // namespace

TEST(OracleConfig, Validation) {
  EXPECT_NO_THROW(OracleConfig{}.validate());
  EXPECT_THROW((OracleConfig{.latent_dim = 1}.validate()), ConfigError);
  EXPECT_THROW((OracleConfig{.feature_dim = 1}.validate()), ConfigError);
  EXPECT_THROW((OracleConfig{.group_count = 1, .majority_group = 0}.validate()), ConfigError);
  EXPECT_THROW((OracleConfig{.skew_bias = -0.1}.validate()), ConfigError);
  EXPECT_THROW((OracleConfig{.label_noise = 1.0}.validate()), ConfigError);
  EXPECT_THROW((OracleConfig{.majority_group = 5}.validate()), ConfigError);
}

TEST(OracleGenerate, ZeroMapsToZero) {
  Oracle oracle{OracleConfig{}};
  const auto x = oracle.generate(LatentVector::zeros(16));
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(OracleGenerate, DeterministicAndBounded) {
  Oracle a{OracleConfig{}}, b{OracleConfig{}};
  RngHandle rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto z = sample_latent(rng, 16);
    const auto x = a.generate(z);
    ASSERT_EQ(x, b.generate(z));
    ASSERT_EQ(x.size(), 8u);
    for (double v : x) ASSERT_LT(std::abs(v), 1.0);
  }
}

TEST(OracleGenerate, MatchesTanhOfMixing) {
  Oracle oracle{OracleConfig{}};
  const auto& a = oracle.ground_truth().mixing;
  RngHandle rng(9);
  const auto z = sample_latent(rng, 16);
  const auto x = oracle.generate(z);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * z[j];
    EXPECT_DOUBLE_EQ(x[i], std::tanh(s));
  }
}

TEST(OracleGenerate, DimensionMismatchThrows) {
  Oracle oracle{OracleConfig{}};
  EXPECT_THROW(oracle.generate(LatentVector::zeros(15)), DimensionMismatchError);
  EXPECT_THROW(oracle.true_group(LatentVector::zeros(17)), DimensionMismatchError);
}

TEST(OracleTrueGroup, HandEvaluatedTinyTruth) {
  const auto oracle = tiny_oracle({0.0, 0.0});
  EXPECT_EQ(oracle.true_group(LatentVector{1, 0}), 0u);
  EXPECT_EQ(oracle.true_group(LatentVector{0, 1}), 1u);
  EXPECT_EQ(oracle.true_group(LatentVector{0.2, 0.3}), 1u);
}

TEST(OracleTrueGroup, ZeroLatentPicksBiasedGroup) {
  EXPECT_EQ(tiny_oracle({0.0, 0.0, 1.5}).true_group(LatentVector{0, 0}), 2u);
}

TEST(OracleTrueGroup, TiesGoToLowestIndex) {
  EXPECT_EQ(tiny_oracle({0.0, 0.0, 0.0}).true_group(LatentVector{0, 0}), 0u);
  EXPECT_EQ(tiny_oracle({0.0, 0.0}).true_group(LatentVector{1, 1}), 0u);
}

TEST(GroundTruth, UnitRowsAndSeedDetermined) {
  const auto t = Oracle::derive_ground_truth(OracleConfig{});
  for (std::size_t k = 0; k < t.group_directions.rows; ++k) {
    double n2 = 0;
    for (double v : t.group_directions.row(k)) n2 += v * v;
    EXPECT_NEAR(n2, 1.0, 1e-12);
  }
  for (std::size_t k = 0; k < t.group_bias.size(); ++k) EXPECT_EQ(t.group_bias[k], k == 3 ? 2.0 : 0.0);
  const auto again = Oracle::derive_ground_truth(OracleConfig{});
  EXPECT_EQ(t.group_directions.data, again.group_directions.data);
  EXPECT_EQ(t.mixing.data, again.mixing.data);
  const auto other = Oracle::derive_ground_truth(OracleConfig{.oracle_seed = 1730});
  EXPECT_NE(t.group_directions.data, other.group_directions.data);
}

TEST(OracleTrueGroup, AgreesWithReferenceArgmax) {
  Oracle oracle{OracleConfig{}};
  RngHandle rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto z = sample_latent(rng, 16);
    ASSERT_EQ(oracle.true_group(z), fixtures::reference_true_group(oracle.ground_truth(), z.values()));
  }
}

// Majority share of the hidden truth over 10k standard-normal latents.
TEST(OracleSkew, MajorityShareAboveSixtyPercent) {
  Oracle oracle{OracleConfig{}};
  const auto sample = fixtures::oracle_sample(oracle, 10000, 2024);
  std::size_t majority = 0;
  for (auto g : sample.latents.labels) majority += g == 3;
  EXPECT_GT(majority, 6000u);
}

TEST(OracleObservedGroup, NoiseFreeEqualsTruth) {
  Oracle oracle{OracleConfig{}};
  RngHandle rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto z = sample_latent(rng, 16);
    ASSERT_EQ(oracle.observed_group(z), oracle.true_group(z));
  }
}

TEST(OracleObservedGroup, NoiseRateAndDeterminism) {
  Oracle oracle{OracleConfig{.label_noise = 0.2}};
  RngHandle rng(2);
  std::size_t flipped = 0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto z = sample_latent(rng, 16);
    const auto g = oracle.observed_group(z);
    ASSERT_EQ(g, oracle.observed_group(z));
    ASSERT_LT(g, 5u);
    flipped += g != oracle.true_group(z);
  }
  // binomial sd at n=20000, p=0.2 is ~0.0028
  EXPECT_NEAR(static_cast<double>(flipped) / n, 0.2, 0.012);
}

TEST(OracleAttributes, BalancedSignOfHiddenFunctional) {
  Oracle oracle{OracleConfig{}};
  ASSERT_EQ(oracle.attribute_count(), 3u);
  RngHandle rng(4);
  std::size_t positives = 0;
  for (int i = 0; i < 10000; ++i) positives += oracle.attribute_truth(0, sample_latent(rng, 16));
  EXPECT_NEAR(positives / 10000.0, 0.5, 0.04);
  EXPECT_THROW(oracle.attribute_truth(3, LatentVector::zeros(16)), NotFoundError);
}

TEST(OracleGenerator, AdapterPreservesOrder) {
  OracleGenerator gen{Oracle{OracleConfig{}}};
  RngHandle rng(3);
  std::vector<LatentVector> batch{sample_latent(rng, 16), sample_latent(rng, 16), sample_latent(rng, 16)};
  const auto out = gen.generate(batch);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].feature, gen.oracle().generate(batch[i]));
    EXPECT_FALSE(out[i].image_ref);
  }
  EXPECT_EQ(gen.descriptor()["kind"], "oracle");
}

TEST(Oracle, InjectedTruthShapeChecked) {
  GroundTruth t;
  t.group_directions = Matrix(2, 3);
  t.group_bias = {0, 0};
  t.mixing = Matrix(2, 2);
  EXPECT_THROW(Oracle(OracleConfig{.latent_dim = 2, .feature_dim = 2, .group_count = 2, .majority_group = 0}, t),
               ConfigError);
}
