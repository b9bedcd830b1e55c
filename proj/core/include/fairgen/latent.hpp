#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fairgen {

/// Norms at or below this are treated as the zero vector.
inline constexpr double kDegenerateNorm = 1e-12;

/// Finite, non-empty, immutable vector of doubles. `Tag` keeps latent and
/// feature vectors from being mixed up at compile time.
template <class Tag>
class BasicVector {
 public:
  /// Throws InvalidDimensionError when empty, NonFiniteError on NaN/Inf.
  explicit BasicVector(std::vector<double> components);
  BasicVector(std::initializer_list<double> components)
      : BasicVector(std::vector<double>(components)) {}

  std::size_t size() const noexcept { return components_.size(); }
  double operator[](std::size_t i) const noexcept { return components_[i]; }
  std::span<const double> values() const noexcept { return components_; }
  const std::vector<double>& to_vector() const noexcept { return components_; }

  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  friend bool operator==(const BasicVector&, const BasicVector&) = default;

  /// Zero vector of length d (d >= 1).
  static BasicVector zeros(std::size_t d);

 private:
  std::vector<double> components_;
};

struct LatentTag {};
struct FeatureTag {};

/// Point in the generator's input space.
using LatentVector = BasicVector<LatentTag>;
/// Generator output; the stand-in for an image.
using FeatureVector = BasicVector<FeatureTag>;

extern template class BasicVector<LatentTag>;
extern template class BasicVector<FeatureTag>;

/// Seeded random source. Gaussian draws use Box-Muller over mt19937_64, whose
/// raw sequence is fixed by the standard, so output is reproducible across
/// standard libraries as well as runs. Single owner; do not share across threads.
class RngHandle {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/box-muller/1";

  explicit RngHandle(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double standard_normal();
  std::uint64_t next_u64() { return engine_(); }

  /// Handle for worker `index`, seeded with `seed ^ index`.
  RngHandle split(std::uint64_t index) const { return RngHandle(seed_ ^ index); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// d i.i.d. standard-normal components. Throws InvalidDimensionError for d == 0.
LatentVector sample_latent(RngHandle& rng, std::size_t d);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

template <class Tag>
double dot(const BasicVector<Tag>& a, const BasicVector<Tag>& b) {
  return dot(a.values(), b.values());
}

/// v / ||v||_2. Throws DegenerateVectorError when ||v|| <= kDegenerateNorm.
LatentVector normalize(const LatentVector& v);
std::vector<double> normalize(std::span<const double> v);

}  // namespace fairgen
