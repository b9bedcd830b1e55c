#include "fairgen/latent.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fairgen/errors.hpp"

namespace fairgen {

template <class Tag>
BasicVector<Tag>::BasicVector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidDimensionError("vector dimension must be >= 1");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (!std::isfinite(components_[i]))
      throw NonFiniteError("non-finite component at index " + std::to_string(i));
  }
}

template <class Tag>
BasicVector<Tag> BasicVector<Tag>::zeros(std::size_t d) {
  return BasicVector(std::vector<double>(d, 0.0));
}

template class BasicVector<LatentTag>;
template class BasicVector<FeatureTag>;

RngHandle::RngHandle(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RngHandle::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngHandle::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

LatentVector sample_latent(RngHandle& rng, std::size_t d) {
  if (d == 0) throw InvalidDimensionError("latent dimension must be >= 1");
  std::vector<double> z(d);
  for (auto& c : z) c = rng.standard_normal();
  return LatentVector(std::move(z));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatchError(a.size(), b.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(std::span<const double> v) {
  return std::sqrt(dot(v, v));
}

std::vector<double> normalize(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (!(norm > kDegenerateNorm)) throw DegenerateVectorError("cannot normalize a near-zero vector");
  std::vector<double> out(v.begin(), v.end());
  for (auto& c : out) c /= norm;
  return out;
}

LatentVector normalize(const LatentVector& v) {
  return LatentVector(normalize(v.values()));
}

}  // namespace fairgen
