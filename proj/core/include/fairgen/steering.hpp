#pragma once

#include <string>
#include <string_view>

#include "fairgen/classifier.hpp"
#include "fairgen/groups.hpp"
#include "fairgen/latent.hpp"

namespace fairgen {

/// Unit normal of a latent probe's decision hyperplane, pointing into the
/// positive (target-group) half-space.
struct SteerDirection {
  LatentVector direction;
  GroupLabel group;
  std::string source_model_id;
  /// ||theta||_2 of the probe, kept so raw-mode steering can add theta itself.
  double raw_theta_norm = 0.0;
};

enum class SteerMode {
  /// z + theta: add the probe's parameter vector as is.
  raw_theta,
  /// z + alpha * theta / ||theta||.
  unit_scaled,
};

std::string_view to_string(SteerMode mode);
SteerMode steer_mode_from_string(std::string_view text);

struct SteerPolicy {
  SteerMode mode = SteerMode::raw_theta;
  double alpha = 1.0;

  void validate() const;
  friend bool operator==(const SteerPolicy&, const SteerPolicy&) = default;
};

/// weights / ||weights||; the bias contributes no direction.
/// Throws WrongSpaceError for feature-space models, DegenerateVectorError for
/// near-zero weights.
SteerDirection direction_from_model(const LinearModel& model, GroupLabel group, std::string source_model_id = {});

LatentVector steer(const LatentVector& z, const SteerDirection& dir, const SteerPolicy& policy);

/// The unit-norm latent maximising sigma(<theta, z>): by Cauchy-Schwarz,
/// <theta, u> = ||theta|| cos(angle) peaks at u = theta / ||theta||.
LatentVector best_unit_latent(const LinearModel& model);

}  // namespace fairgen
