#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <fairgen/errors.hpp>
#include <fairgen/latent.hpp>

using namespace fairgen;

TEST(LatentVector, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(LatentVector(std::vector<double>{}), InvalidDimensionError);
  EXPECT_THROW(LatentVector({1.0, NAN}), NonFiniteError);
  EXPECT_THROW(FeatureVector({INFINITY}), NonFiniteError);
  EXPECT_NO_THROW(LatentVector({0.0}));
}

TEST(SampleLatent, SameSeedSameVector) {
  RngHandle a(42), b(42);
  EXPECT_EQ(sample_latent(a, 16), sample_latent(b, 16));
}

TEST(SampleLatent, ZeroDimensionThrows) {
  RngHandle rng(42);
  EXPECT_THROW(sample_latent(rng, 0), InvalidDimensionError);
}

TEST(SampleLatent, AdvancesTheStream) {
  RngHandle rng(42);
  EXPECT_NE(sample_latent(rng, 4), sample_latent(rng, 4));
}

// Per-coordinate mean and std over 100k draws; 4/sqrt(n) ~ 0.0126 < 0.02.
TEST(SampleLatent, StandardNormalMoments) {
  constexpr std::size_t n = 100000, d = 8;
  RngHandle rng(42);
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = sample_latent(rng, d);
    for (std::size_t j = 0; j < d; ++j) {
      sum[j] += z[j];
      sq[j] += z[j] * z[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double mean = sum[j] / n;
    const double sd = std::sqrt(sq[j] / n - mean * mean);
    EXPECT_NEAR(mean, 0.0, 0.02) << "coordinate " << j;
    EXPECT_NEAR(sd, 1.0, 0.02) << "coordinate " << j;
  }
}

TEST(RngHandle, SplitIsSeedXorIndex) {
  RngHandle root(1000);
  auto w3 = root.split(3);
  RngHandle direct(1000 ^ 3);
  EXPECT_EQ(w3.seed(), 1000u ^ 3u);
  EXPECT_EQ(sample_latent(w3, 5), sample_latent(direct, 5));
}

TEST(RngHandle, UniformInUnitInterval) {
  RngHandle rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Dot, HandArithmetic) {
  EXPECT_EQ(dot(LatentVector{1, 0}, LatentVector{0, 1}), 0.0);
  EXPECT_EQ(dot(LatentVector{1, 2}, LatentVector{3, 4}), 11.0);
}

TEST(Dot, LengthMismatchThrows) {
  EXPECT_THROW(dot(LatentVector{1, 2}, LatentVector{1, 2, 3}), DimensionMismatchError);
}

TEST(Dot, SymmetricAndBilinear) {
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 12;
    std::vector<double> a(d), b(d), c(d), ab(d);
    for (auto* v : {&a, &b, &c})
      for (auto& x : *v) x = u(engine);
    const double s = u(engine), t = u(engine);
    for (std::size_t j = 0; j < d; ++j) ab[j] = s * a[j] + t * b[j];
    EXPECT_NEAR(dot(a, b), dot(b, a), 1e-9);
    const double lhs = dot(ab, c), rhs = s * dot(a, c) + t * dot(b, c);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Normalize, Examples) {
  const auto v = normalize(LatentVector{3, 4});
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
  EXPECT_EQ(normalize(LatentVector{1, 0, 0}), (LatentVector{1, 0, 0}));
  EXPECT_THROW(normalize(LatentVector{0, 0}), DegenerateVectorError);
  EXPECT_THROW(normalize(LatentVector{1e-13, 0}), DegenerateVectorError);
}

TEST(Normalize, UnitNormAndScaleInvariance) {
  std::mt19937_64 engine(11);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + trial % 20);
    for (auto& x : v) x = u(engine);
    const auto n = normalize(LatentVector(v));
    EXPECT_NEAR(l2_norm(n.values()), 1.0, 1e-9);
    const double c = scale(engine);
    std::vector<double> cv(v);
    for (auto& x : cv) x *= c;
    const auto m = normalize(LatentVector(cv));
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(n[j], m[j], 1e-9);
  }
}
