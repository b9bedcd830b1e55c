#include "fairgen/steering.hpp"

#include <cmath>

#include "fairgen/errors.hpp"

namespace fairgen {

std::string_view to_string(SteerMode mode) {
  return mode == SteerMode::raw_theta ? "raw_theta" : "unit_scaled";
}

SteerMode steer_mode_from_string(std::string_view text) {
  if (text == "raw_theta") return SteerMode::raw_theta;
  if (text == "unit_scaled") return SteerMode::unit_scaled;
  throw ConfigError("unknown steer mode: " + std::string(text));
}

void SteerPolicy::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("steer alpha must be finite and >= 0");
}

LatentVector best_unit_latent(const LinearModel& model) {
  if (model.space != Space::latent)
    throw WrongSpaceError("steering needs a latent-space model, got a " + std::string(to_string(model.space)) +
                          "-space model");
  return LatentVector(normalize(model.weights));
}

SteerDirection direction_from_model(const LinearModel& model, GroupLabel group, std::string source_model_id) {
  auto unit = best_unit_latent(model);
  return SteerDirection{std::move(unit), std::move(group), std::move(source_model_id), l2_norm(model.weights)};
}

LatentVector steer(const LatentVector& z, const SteerDirection& dir, const SteerPolicy& policy) {
  if (z.size() != dir.direction.size()) throw DimensionMismatchError(dir.direction.size(), z.size(), "steer");
  const double step = policy.mode == SteerMode::raw_theta ? dir.raw_theta_norm : policy.alpha;
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + step * dir.direction[i];
  return LatentVector(std::move(out));
}

}  // namespace fairgen
