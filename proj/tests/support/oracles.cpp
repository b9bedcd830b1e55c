#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fairgen/record.hpp>

namespace fairgen::fixtures {

double reference_loss(std::span<const double> w, double b, const LabeledData& data, double l2) {
  long double total = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    long double t = b;
    for (std::size_t j = 0; j < w.size(); ++j) t += w[j] * data.inputs[i][j];
    // log(1 + e^t) - y t, stable both ways
    const long double softplus = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    total += softplus - (data.labels[i] == 1 ? t : 0.0L);
  }
  long double norm2 = 0;
  for (double v : w) norm2 += static_cast<long double>(v) * v;
  return static_cast<double>(total / data.size() + 0.5L * l2 * norm2);
}

FdGradient finite_difference_gradient(std::span<const double> w, double b, const LabeledData& data, double l2,
                                      double h) {
  FdGradient g;
  std::vector<double> probe(w.begin(), w.end());
  for (std::size_t j = 0; j < w.size(); ++j) {
    probe[j] = w[j] + h;
    const double up = reference_loss(probe, b, data, l2);
    probe[j] = w[j] - h;
    const double down = reference_loss(probe, b, data, l2);
    probe[j] = w[j];
    g.weights.push_back((up - down) / (2 * h));
  }
  g.bias = (reference_loss(w, b + h, data, l2) - reference_loss(w, b - h, data, l2)) / (2 * h);
  return g;
}

double max_relative_error(const Gradient& analytic, const FdGradient& fd, double floor) {
  auto rel = [floor](double a, double f) { return std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor}); };
  double worst = rel(analytic.bias, fd.bias);
  for (std::size_t j = 0; j < fd.weights.size(); ++j) worst = std::max(worst, rel(analytic.weights.at(j), fd.weights[j]));
  return worst;
}

double sphere_max_projection(std::span<const double> theta, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  double best = -INFINITY;
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0;
    for (auto& c : u) {
      c = normal(engine);
      norm2 += c * c;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    double p = 0;
    for (std::size_t j = 0; j < u.size(); ++j) p += theta[j] * u[j] * inv;
    best = std::max(best, p);
  }
  return best;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

std::size_t reference_true_group(const GroundTruth& truth, std::span<const double> z) {
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t k = 0; k < truth.group_directions.rows; ++k) {
    double s = truth.group_bias[k];
    for (std::size_t j = 0; j < z.size(); ++j) s += truth.group_directions(k, j) * z[j];
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

OracleSample oracle_sample(const Oracle& oracle, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  OracleSample out;
  std::vector<double> z(oracle.config().latent_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : z) c = normal(engine);
    const LatentVector latent(z);
    const auto g = oracle.true_group(latent);
    out.latents.add(z, g);
    out.features.add(oracle.generate(latent).values(), g);
  }
  return out;
}

Manifest synthetic_manifest(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> conf(0.5, 1.0);
  Manifest m;
  m.header.latent_dim = 4;
  m.header.feature_dim = 3;
  m.header.groups = GroupSet::defaults(5);
  m.header.root_seed = seed;
  m.header.created_at = "2026-01-01T00:00:00.000Z";
  m.header.rng_algorithm = std::string(RngHandle::kAlgorithm);
  m.header.generator = {{"kind", "test"}};
  m.header.attributes = {{"smile", {"no", "yes"}}, {"gender", {"female", "male"}}};
  RecordIdGenerator ids(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(4), x(3);
    for (auto& c : z) c = normal(engine);
    for (auto& c : x) c = std::tanh(normal(engine));
    const std::size_t g = i % 5;
    DatasetRecord r{.record_id = ids.next(1767225600000 + i),
                    .latent = LatentVector(z),
                    .feature = FeatureVector(x),
                    .group = m.header.groups.at(g),
                    .group_confidence = conf(engine),
                    .created_at = "2026-01-01T00:00:00.000Z"};
    if (i % 3 == 0) r.steered_toward = m.header.groups.at((g + 1) % 5);
    r.downstream_labels["smile"] = {i % 2 ? "yes" : "no", conf(engine)};
    r.downstream_labels["gender"] = {i % 4 < 2 ? "female" : "male", conf(engine)};
    r.label_provenance["smile"] = Provenance::automatic;
    r.label_provenance["gender"] = Provenance::automatic;
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace fairgen::fixtures
