#include "fairgen/generator.hpp"

#include <bit>
#include <cmath>

#include "fairgen/errors.hpp"

namespace fairgen {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw DimensionMismatchError(r * c, data.size(), "matrix");
}

void OracleConfig::validate() const {
  if (latent_dim < 2) throw ConfigError("oracle.latent_dim must be >= 2");
  if (feature_dim < 2) throw ConfigError("oracle.feature_dim must be >= 2");
  if (group_count < 2) throw ConfigError("oracle.group_count must be >= 2");
  if (!(skew_bias >= 0.0) || !std::isfinite(skew_bias)) throw ConfigError("oracle.skew_bias must be finite and >= 0");
  if (!(label_noise >= 0.0 && label_noise < 1.0)) throw ConfigError("oracle.label_noise must lie in [0, 1)");
  if (majority_group >= group_count) throw ConfigError("oracle.majority_group must be < group_count");
}

namespace {

Matrix gaussian_matrix(RngHandle& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.standard_normal();
  return m;
}

void normalize_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto row = m.row(i);
    const auto unit = normalize(std::span<const double>(row.data(), row.size()));
    std::copy(unit.begin(), unit.end(), row.begin());
  }
}

// Modified Gram-Schmidt on the rows; requires rows <= cols.
void orthonormalize_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto ri = m.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const auto rj = std::as_const(m).row(j);
      const double proj = dot(std::span<const double>(ri.data(), ri.size()), rj);
      for (std::size_t c = 0; c < m.cols; ++c) ri[c] -= proj * rj[c];
    }
    const auto unit = normalize(std::span<const double>(ri.data(), ri.size()));
    std::copy(unit.begin(), unit.end(), ri.begin());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

GroundTruth Oracle::derive_ground_truth(const OracleConfig& config) {
  config.validate();
  const std::size_t d = config.latent_dim;
  const std::size_t k = config.group_count;
  const std::size_t m = config.feature_dim;
  RngHandle rng(config.oracle_seed);

  // Group directions: orthonormal, then centred so the rows form a regular
  // simplex (pairwise cosine -1/(K-1)).
  Matrix w = gaussian_matrix(rng, k, d);
  if (k <= d) orthonormalize_rows(w);
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < d; ++c) mean[c] += w(i, c) / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < d; ++c) w(i, c) -= mean[c];
  normalize_rows(w);

  const std::size_t attributes = m > k ? m - k : 0;
  Matrix attr = gaussian_matrix(rng, attributes, d);
  normalize_rows(attr);

  // Basis rows [W; R] truncated to m, scrambled by a random rotation.
  Matrix basis(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    const auto src = i < k ? std::as_const(w).row(i) : std::as_const(attr).row(i - k);
    std::copy(src.begin(), src.end(), basis.row(i).begin());
  }
  Matrix rot = gaussian_matrix(rng, m, m);
  orthonormalize_rows(rot);
  Matrix mixing(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t c = 0; c < d; ++c) mixing(i, c) += kFeatureGain * rot(i, j) * basis(j, c);

  std::vector<double> bias(k, 0.0);
  bias[config.majority_group] = config.skew_bias;
  return GroundTruth{std::move(w), std::move(bias), std::move(mixing), std::move(attr)};
}

Oracle::Oracle(OracleConfig config) : config_(config), truth_(derive_ground_truth(config_)) {}

Oracle::Oracle(OracleConfig config, GroundTruth truth) : config_(config), truth_(std::move(truth)) {
  config_.validate();
  const auto& t = truth_;
  if (t.group_directions.rows != config_.group_count || t.group_directions.cols != config_.latent_dim)
    throw ConfigError("ground truth: group_directions must be group_count x latent_dim");
  if (t.group_bias.size() != config_.group_count) throw ConfigError("ground truth: group_bias must have group_count entries");
  if (t.mixing.rows != config_.feature_dim || t.mixing.cols != config_.latent_dim)
    throw ConfigError("ground truth: mixing must be feature_dim x latent_dim");
  if (t.attribute_directions.rows > 0 && t.attribute_directions.cols != config_.latent_dim)
    throw ConfigError("ground truth: attribute_directions must have latent_dim columns");
}

void Oracle::check_dim(const LatentVector& z) const {
  if (z.size() != config_.latent_dim) throw DimensionMismatchError(config_.latent_dim, z.size(), "oracle");
}

FeatureVector Oracle::generate(const LatentVector& z) const {
  check_dim(z);
  const auto& a = truth_.mixing;
  std::vector<double> x(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) x[i] = std::tanh(dot(a.row(i), z.values()));
  return FeatureVector(std::move(x));
}

std::size_t Oracle::true_group(const LatentVector& z) const {
  check_dim(z);
  const auto& w = truth_.group_directions;
  std::size_t best = 0;
  double best_score = dot(w.row(0), z.values()) + truth_.group_bias[0];
  for (std::size_t k = 1; k < w.rows; ++k) {
    const double score = dot(w.row(k), z.values()) + truth_.group_bias[k];
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

std::size_t Oracle::observed_group(const LatentVector& z) const {
  const std::size_t truth = true_group(z);
  if (config_.label_noise == 0.0) return truth;
  std::uint64_t h = splitmix64(config_.oracle_seed);
  for (double c : z) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(c));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u >= config_.label_noise) return truth;
  const std::size_t other = splitmix64(h) % (config_.group_count - 1);
  return other >= truth ? other + 1 : other;
}

bool Oracle::attribute_truth(std::size_t attribute, const LatentVector& z) const {
  check_dim(z);
  if (attribute >= attribute_count())
    throw NotFoundError("oracle attribute " + std::to_string(attribute) + " out of range");
  return dot(truth_.attribute_directions.row(attribute), z.values()) > 0.0;
}

std::vector<GeneratedSample> OracleGenerator::generate(std::span<const LatentVector> batch) const {
  std::vector<GeneratedSample> out;
  out.reserve(batch.size());
  for (const auto& z : batch) out.push_back(GeneratedSample{oracle_.generate(z), std::nullopt});
  return out;
}

nlohmann::json OracleGenerator::descriptor() const {
  const auto& c = oracle_.config();
  return {{"kind", "oracle"},
          {"latent_dim", c.latent_dim},
          {"feature_dim", c.feature_dim},
          {"group_count", c.group_count},
          {"oracle_seed", c.oracle_seed},
          {"skew_bias", c.skew_bias},
          {"label_noise", c.label_noise},
          {"majority_group", c.majority_group}};
}

}  // namespace fairgen
