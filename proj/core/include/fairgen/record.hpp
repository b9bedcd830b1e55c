#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "fairgen/groups.hpp"
#include "fairgen/latent.hpp"

namespace fairgen {

enum class Provenance { automatic, manual };

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view text);

struct DownstreamLabel {
  std::string value;
  double confidence = 0.0;

  friend bool operator==(const DownstreamLabel&, const DownstreamLabel&) = default;
};

/// Who overrode an automatic label, when, and what it replaced.
struct ManualResolution {
  std::string resolver;
  std::string resolved_at;
  std::string auto_value;
  double auto_confidence = 0.0;

  friend bool operator==(const ManualResolution&, const ManualResolution&) = default;
};

/// The stored (latent, generated output, group) triple plus downstream
/// labels. `version` increases each time a superseding copy is appended to a
/// manifest; readers keep the highest version per record_id.
struct DatasetRecord {
  std::string record_id;
  std::uint64_t version = 1;
  LatentVector latent;
  FeatureVector feature;
  std::optional<std::string> image_ref;
  GroupLabel group;
  double group_confidence = 0.0;
  std::optional<GroupLabel> steered_toward;
  /// Set only on rejected samples kept for analysis.
  bool rejected = false;
  std::map<std::string, DownstreamLabel> downstream_labels;
  std::map<std::string, Provenance> label_provenance;
  std::map<std::string, ManualResolution> resolutions;
  std::string created_at;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp_now();

/// ULID-style identifiers: 48-bit millisecond timestamp + 80 random bits,
/// Crockford base32, 26 characters. Randomness comes from a seeded stream so
/// ids are reproducible given the clock. Thread-safe.
class RecordIdGenerator {
 public:
  explicit RecordIdGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string next();
  std::string next(std::uint64_t unix_millis);

 private:
  std::mutex mutex_;
  RngHandle rng_;
};

}  // namespace fairgen
