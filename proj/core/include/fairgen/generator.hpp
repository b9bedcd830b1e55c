#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairgen/latent.hpp"

namespace fairgen {

/// One generator output: the feature vector plus an opaque image reference
/// (file path or data URI) when the backend produces real images.
struct GeneratedSample {
  FeatureVector feature;
  std::optional<std::string> image_ref;
};

/// Latent -> feature contract shared by the synthetic oracle and the
/// external-generator client. Implementations must be safe to call from
/// several threads at once.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::size_t latent_dim() const = 0;
  /// 0 when not known ahead of the first response.
  virtual std::size_t feature_dim() const = 0;
  /// One sample per latent, order preserved.
  virtual std::vector<GeneratedSample> generate(std::span<const LatentVector> batch) const = 0;
  /// Self-description recorded in manifest headers.
  virtual nlohmann::json descriptor() const = 0;
};

/// Row-major dense matrix, just enough for the oracle.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

struct OracleConfig {
  std::size_t latent_dim = 16;
  std::size_t feature_dim = 8;
  std::size_t group_count = 5;
  std::uint64_t oracle_seed = 1729;
  /// Added to the majority group's hidden score.
  double skew_bias = 2.0;
  double label_noise = 0.0;
  std::size_t majority_group = 3;

  /// Throws ConfigError on d < 2, m < 2, K < 2, negative bias, noise outside [0,1)
  /// or a majority index >= K.
  void validate() const;

  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

/// Hidden structure of the oracle. Tests may construct one by hand and inject it.
struct GroundTruth {
  Matrix group_directions;               ///< K x d, unit rows
  std::vector<double> group_bias;        ///< K
  Matrix mixing;                         ///< m x d
  Matrix attribute_directions;           ///< A x d, unit rows (may be empty)
};

/// Seeded synthetic stand-in for the image generator, with a skewed hidden
/// group structure:
///
///   feature(z)    = tanh(mixing * z)
///   true_group(z) = argmax_k (W_k . z + b_k), lowest index on ties
///
/// where b is zero except `skew_bias` on the majority group. Everything is a
/// pure function of (config, z).
class Oracle {
 public:
  /// Scale applied to the mixing basis before tanh; keeps features in the
  /// near-linear part of tanh.
  static constexpr double kFeatureGain = 0.25;

  explicit Oracle(OracleConfig config);
  Oracle(OracleConfig config, GroundTruth truth);

  const OracleConfig& config() const noexcept { return config_; }
  /// Test-only view of the hidden structure.
  const GroundTruth& ground_truth() const noexcept { return truth_; }

  FeatureVector generate(const LatentVector& z) const;
  std::size_t true_group(const LatentVector& z) const;
  /// true_group with `label_noise` applied: with that probability a different
  /// group is reported. Deterministic in (oracle_seed, z).
  std::size_t observed_group(const LatentVector& z) const;

  /// Hidden binary attributes (sign of a fixed linear functional of z) that
  /// are visible in the features; used to train downstream attribute heads.
  std::size_t attribute_count() const noexcept { return truth_.attribute_directions.rows; }
  bool attribute_truth(std::size_t attribute, const LatentVector& z) const;

  static GroundTruth derive_ground_truth(const OracleConfig& config);

 private:
  void check_dim(const LatentVector& z) const;

  OracleConfig config_;
  GroundTruth truth_;
};

/// Generator adapter over an Oracle.
class OracleGenerator final : public Generator {
 public:
  explicit OracleGenerator(Oracle oracle) : oracle_(std::move(oracle)) {}

  std::size_t latent_dim() const override { return oracle_.config().latent_dim; }
  std::size_t feature_dim() const override { return oracle_.config().feature_dim; }
  std::vector<GeneratedSample> generate(std::span<const LatentVector> batch) const override;
  nlohmann::json descriptor() const override;

  const Oracle& oracle() const noexcept { return oracle_; }

 private:
  Oracle oracle_;
};

struct HttpGeneratorOptions {
  /// Base URI, e.g. "http://127.0.0.1:9000" or "http://host:9000/prefix".
  std::string endpoint;
  std::size_t latent_dim = 512;
  /// Expected feature length; 0 accepts whatever the server returns as long
  /// as it is uniform within a response.
  std::size_t feature_dim = 0;
  int attempts = 3;
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds backoff{200};
};

/// Client for an external generator speaking the JSON protocol:
///
///   POST <endpoint>/generate  {"latents": [[...], ...]}
///   200 -> {"features": [[...], ...], "images": ["...", ...]?}
///
/// Non-200 status and connection failures raise TransportError once all
/// attempts are spent; malformed bodies raise ProtocolError immediately.
class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(HttpGeneratorOptions options);

  std::size_t latent_dim() const override { return options_.latent_dim; }
  std::size_t feature_dim() const override { return options_.feature_dim; }
  std::vector<GeneratedSample> generate(std::span<const LatentVector> batch) const override;
  nlohmann::json descriptor() const override;

  /// Validates a decoded response against a batch of `expected` latents.
  static std::vector<GeneratedSample> decode_response(const nlohmann::json& body, std::size_t expected,
                                                      std::size_t feature_dim);
  static nlohmann::json encode_request(std::span<const LatentVector> batch);

 private:
  HttpGeneratorOptions options_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace fairgen
