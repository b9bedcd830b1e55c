#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <fairgen/errors.hpp>
#include <fairgen/steering.hpp>

#include "support/oracles.hpp"

using namespace fairgen;

namespace {

LinearModel latent_model(std::vector<double> w, double b = 0.0) {
  return LinearModel{.weights = std::move(w), .bias = b, .space = Space::latent};
}

const GroupLabel kAsian{0, "Asian"};

}  // namespace

TEST(DirectionFromModel, NormalizesWeightsIgnoringBias) {
  const auto dir = direction_from_model(latent_model({3, 4}, 17.0), kAsian, "probe-0");
  EXPECT_NEAR(dir.direction[0], 0.6, 1e-15);
  EXPECT_NEAR(dir.direction[1], 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(dir.raw_theta_norm, 5.0);
  EXPECT_EQ(dir.group, kAsian);
  EXPECT_EQ(dir.source_model_id, "probe-0");
}

TEST(DirectionFromModel, ScaleInvariant) {
  std::mt19937_64 engine(21);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(16);
    for (auto& v : w) v = normal(engine);
    const double c = scale(engine);
    std::vector<double> cw(w);
    for (auto& v : cw) v *= c;
    const auto a = direction_from_model(latent_model(w), kAsian);
    const auto b = direction_from_model(latent_model(cw), kAsian);
    EXPECT_NEAR(l2_norm(a.direction.values()), 1.0, 1e-9);
    for (std::size_t j = 0; j < w.size(); ++j) EXPECT_NEAR(a.direction[j], b.direction[j], 1e-9);
  }
}

TEST(DirectionFromModel, Errors) {
  LinearModel feature{.weights = {1, 0}, .space = Space::feature};
  EXPECT_THROW(direction_from_model(feature, kAsian), WrongSpaceError);
  EXPECT_THROW(direction_from_model(latent_model({0, 0}), kAsian), DegenerateVectorError);
  EXPECT_THROW(best_unit_latent(feature), WrongSpaceError);
}

TEST(Steer, UnitScaledAlphaZeroIsIdentity) {
  const auto dir = direction_from_model(latent_model({3, 4}), kAsian);
  const LatentVector z{0.25, -1.5};
  EXPECT_EQ(steer(z, dir, {SteerMode::unit_scaled, 0.0}), z);
}

TEST(Steer, UnitScaledFromOrigin) {
  const auto dir = direction_from_model(latent_model({3, 4}), kAsian);
  const auto out = steer(LatentVector{0, 0}, dir, {SteerMode::unit_scaled, 1.0});
  EXPECT_NEAR(out[0], 0.6, 1e-15);
  EXPECT_NEAR(out[1], 0.8, 1e-15);
}

TEST(Steer, RawThetaAddsTheta) {
  const auto dir = direction_from_model(latent_model({3, 4}), kAsian);
  const auto out = steer(LatentVector{1, 1}, dir, SteerPolicy{});
  EXPECT_NEAR(out[0], 4.0, 1e-12);
  EXPECT_NEAR(out[1], 5.0, 1e-12);
}

TEST(Steer, DimensionMismatchThrows) {
  const auto dir = direction_from_model(latent_model({3, 4}), kAsian);
  EXPECT_THROW(steer(LatentVector{1, 1, 1}, dir, SteerPolicy{}), DimensionMismatchError);
}

TEST(Steer, PreservesDimensionAndFiniteness) {
  std::mt19937_64 engine(8);
  std::normal_distribution<double> normal;
  RngHandle rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(16);
    for (auto& v : w) v = 10 * normal(engine);
    const auto dir = direction_from_model(latent_model(w), kAsian);
    for (auto policy : {SteerPolicy{}, SteerPolicy{SteerMode::unit_scaled, 3.5}}) {
      const auto out = steer(sample_latent(rng, 16), dir, policy);
      ASSERT_EQ(out.size(), 16u);
      for (double v : out) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(SteerPolicy, Validation) {
  EXPECT_NO_THROW(SteerPolicy{}.validate());
  EXPECT_THROW((SteerPolicy{SteerMode::unit_scaled, -1.0}.validate()), ConfigError);
  EXPECT_THROW((SteerPolicy{SteerMode::unit_scaled, INFINITY}.validate()), ConfigError);
  EXPECT_EQ(steer_mode_from_string(to_string(SteerMode::unit_scaled)), SteerMode::unit_scaled);
  EXPECT_EQ(steer_mode_from_string("raw_theta"), SteerMode::raw_theta);
  EXPECT_THROW(steer_mode_from_string("sideways"), ConfigError);
}

TEST(BestUnitLatent, Examples) {
  const auto z = best_unit_latent(latent_model({0, 5}));
  EXPECT_EQ(z, (LatentVector{0, 1}));
  EXPECT_DOUBLE_EQ(sigmoid(dot(std::vector<double>{0, 5}, z.values())), sigmoid(5.0));

  const std::vector<double> theta{1, 1};
  const auto best = best_unit_latent(latent_model(theta));
  EXPECT_LT(dot(theta, std::vector<double>{1, 0}), dot(theta, best.values()));
  EXPECT_NEAR(dot(theta, best.values()), std::sqrt(2.0), 1e-15);
}

// Monte-Carlo sphere oracle: no sampled unit vector beats theta/|theta|.
TEST(BestUnitLatent, BeatsSampledSphere) {
  std::mt19937_64 engine(2718);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> theta(16);
    for (auto& v : theta) v = normal(engine);
    const auto z = best_unit_latent(latent_model(theta));
    const double at_best = dot(theta, z.values());
    EXPECT_LE(fixtures::sphere_max_projection(theta, 10000, 100 + t), at_best + 1e-9);
    EXPECT_NEAR(at_best, l2_norm(theta), 1e-9);
  }
}
