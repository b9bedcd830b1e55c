#pragma once

// Reference computations the tests compare the library against. None of
// these call the code under test for the quantity being checked.

#include <cstdint>
#include <span>
#include <vector>

#include <fairgen/classifier.hpp>
#include <fairgen/generator.hpp>
#include <fairgen/manifest.hpp>

namespace fairgen::fixtures {

// Straight-line BCE + (l2/2)||w||^2, written independently of the library.
double reference_loss(std::span<const double> w, double b, const LabeledData& data, double l2);

struct FdGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

// Central differences of `reference_loss`, step h.
FdGradient finite_difference_gradient(std::span<const double> w, double b, const LabeledData& data, double l2,
                                      double h);

// Componentwise |a - f| / max(|a|, |f|, floor), maximised over weights and bias.
double max_relative_error(const Gradient& analytic, const FdGradient& fd, double floor);

// Largest <theta, u> over n unit vectors drawn uniformly on the sphere with a
// std:: engine (independent of RngHandle).
double sphere_max_projection(std::span<const double> theta, std::size_t n, std::uint64_t seed);

// Cosine similarity computed without the library's dot/normalize.
double cosine(std::span<const double> a, std::span<const double> b);

// Argmax of W z + b evaluated from the raw matrices.
std::size_t reference_true_group(const GroundTruth& truth, std::span<const double> z);

// Oracle-labelled data set drawn with a std:: engine.
struct OracleSample {
  LabeledData latents;
  LabeledData features;
};
OracleSample oracle_sample(const Oracle& oracle, std::size_t n, std::uint64_t seed);

// Small labelled manifest with deterministic contents, `n` records, and two
// binary attributes whose confidences are spread across (0.5, 1).
Manifest synthetic_manifest(std::size_t n, std::uint64_t seed);

}  // namespace fairgen::fixtures
