#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgen/classifier.hpp"
#include "fairgen/record.hpp"

namespace fairgen {

struct Manifest;

inline constexpr double kDefaultReviewThreshold = 0.6;

/// Downstream attribute classifier over feature vectors. Two values use a
/// single binary model (value_names[1] is the positive class); three or more
/// use one-vs-rest models, one per value.
struct AttributeHead {
  std::string attribute_name;
  std::vector<std::string> value_names;
  std::vector<LinearModel> models;

  /// Throws ConfigError on fewer than two values, a model count that does not
  /// fit the value count, or non-feature-space models.
  void validate() const;
  std::size_t input_dim() const;
  /// Predicted value and its probability (for binary heads, max(p, 1 - p)).
  DownstreamLabel predict(std::span<const double> feature) const;
};

/// Fits a head from features labelled with value indices.
AttributeHead train_attribute_head(std::string attribute_name, std::vector<std::string> value_names,
                                   const LabeledData& data, const TrainConfig& config);

/// Fills one automatic label per head on every record. Labels a human has
/// already resolved are left untouched. Throws DimensionMismatchError naming
/// the head when feature sizes disagree.
void label_records(std::span<DatasetRecord> records, std::span<const AttributeHead> heads);

enum class ReviewStatus { pending, resolved };
std::string_view to_string(ReviewStatus status);

struct ReviewItem {
  std::string record_id;
  std::string attribute_name;
  std::string auto_value;
  double confidence = 0.0;
  ReviewStatus status = ReviewStatus::pending;
  std::optional<std::string> resolved_value;
  std::optional<std::string> resolver;
  std::optional<std::string> resolved_at;

  friend bool operator==(const ReviewItem&, const ReviewItem&) = default;
};

/// Pending items for every automatic label with confidence strictly below
/// `threshold`, ascending by confidence, then record_id, then attribute.
/// Rejected records are skipped.
std::vector<ReviewItem> build_review_queue(std::span<const DatasetRecord> records, double threshold);

struct ManualLabelOutcome {
  ReviewItem item;
  /// False when the same value was already recorded (idempotent repeat).
  bool changed = false;
};

/// Records a human decision: label replaced, confidence 1.0, provenance
/// manual, resolver and time kept on the record, version bumped.
/// Throws NotFoundError for unknown record/attribute and InvalidValueError
/// when `value` is not one of the attribute's values.
ManualLabelOutcome apply_manual_label(Manifest& manifest, std::string_view record_id, std::string_view attribute,
                                      std::string_view value, std::string_view resolver,
                                      std::optional<std::string> now = std::nullopt);

/// Review-item view of one labelled attribute of a record.
ReviewItem review_item_for(const DatasetRecord& record, const std::string& attribute);

}  // namespace fairgen
