#include "fairgen/labeling.hpp"

#include <algorithm>

#include "fairgen/errors.hpp"
#include "fairgen/manifest.hpp"

namespace fairgen {

std::string_view to_string(ReviewStatus status) {
  return status == ReviewStatus::pending ? "pending" : "resolved";
}

void AttributeHead::validate() const {
  if (attribute_name.empty()) throw ConfigError("attribute head needs a name");
  if (value_names.size() < 2) throw ConfigError("attribute head '" + attribute_name + "' needs >= 2 values");
  const std::size_t expected = value_names.size() == 2 ? 1 : value_names.size();
  if (models.size() != expected)
    throw ConfigError("attribute head '" + attribute_name + "' expects " + std::to_string(expected) + " model(s)");
  for (const auto& m : models) {
    if (m.space != Space::feature) throw WrongSpaceError("attribute head models must be feature-space models");
    if (m.weights.size() != models.front().weights.size())
      throw ConfigError("attribute head '" + attribute_name + "' models disagree on input size");
  }
}

std::size_t AttributeHead::input_dim() const {
  return models.empty() ? 0 : models.front().weights.size();
}

DownstreamLabel AttributeHead::predict(std::span<const double> feature) const {
  if (value_names.size() == 2) {
    const double p = models.front().probability(feature);
    return p >= 0.5 ? DownstreamLabel{value_names[1], p} : DownstreamLabel{value_names[0], 1.0 - p};
  }
  const auto pred = predict_group(models, feature);
  return DownstreamLabel{value_names.at(pred.group), pred.confidence};
}

AttributeHead train_attribute_head(std::string attribute_name, std::vector<std::string> value_names,
                                   const LabeledData& data, const TrainConfig& config) {
  AttributeHead head{std::move(attribute_name), std::move(value_names), {}};
  if (head.value_names.size() < 2) throw ConfigError("attribute head '" + head.attribute_name + "' needs >= 2 values");
  if (head.value_names.size() == 2) {
    head.models.push_back(train_binary(data, Space::feature, config, 1));
  } else {
    head.models = train_ovr(data, GroupSet(head.value_names), Space::feature, config);
  }
  head.validate();
  return head;
}

void label_records(std::span<DatasetRecord> records, std::span<const AttributeHead> heads) {
  for (const auto& head : heads) {
    head.validate();
    for (const auto& r : records)
      if (r.feature.size() != head.input_dim())
        throw DimensionMismatchError(head.input_dim(), r.feature.size(), "attribute head '" + head.attribute_name + "'");
  }
  for (auto& r : records) {
    for (const auto& head : heads) {
      const auto it = r.label_provenance.find(head.attribute_name);
      if (it != r.label_provenance.end() && it->second == Provenance::manual) continue;
      r.downstream_labels[head.attribute_name] = head.predict(r.feature.values());
      r.label_provenance[head.attribute_name] = Provenance::automatic;
    }
  }
}

ReviewItem review_item_for(const DatasetRecord& record, const std::string& attribute) {
  const auto label = record.downstream_labels.find(attribute);
  if (label == record.downstream_labels.end())
    throw NotFoundError("record " + record.record_id + " has no label for attribute '" + attribute + "'");
  ReviewItem item;
  item.record_id = record.record_id;
  item.attribute_name = attribute;
  item.auto_value = label->second.value;
  item.confidence = label->second.confidence;
  const auto prov = record.label_provenance.find(attribute);
  if (prov != record.label_provenance.end() && prov->second == Provenance::manual) {
    item.status = ReviewStatus::resolved;
    item.resolved_value = label->second.value;
    if (const auto res = record.resolutions.find(attribute); res != record.resolutions.end()) {
      item.auto_value = res->second.auto_value;
      item.confidence = res->second.auto_confidence;
      item.resolver = res->second.resolver;
      item.resolved_at = res->second.resolved_at;
    }
  }
  return item;
}

std::vector<ReviewItem> build_review_queue(std::span<const DatasetRecord> records, double threshold) {
  std::vector<ReviewItem> queue;
  for (const auto& r : records) {
    if (r.rejected) continue;
    for (const auto& [attribute, label] : r.downstream_labels) {
      const auto prov = r.label_provenance.find(attribute);
      if (prov != r.label_provenance.end() && prov->second == Provenance::manual) continue;
      if (label.confidence < threshold) {
        ReviewItem item;
        item.record_id = r.record_id;
        item.attribute_name = attribute;
        item.auto_value = label.value;
        item.confidence = label.confidence;
        queue.push_back(std::move(item));
      }
    }
  }
  std::sort(queue.begin(), queue.end(), [](const ReviewItem& a, const ReviewItem& b) {
    if (a.confidence != b.confidence) return a.confidence < b.confidence;
    if (a.record_id != b.record_id) return a.record_id < b.record_id;
    return a.attribute_name < b.attribute_name;
  });
  return queue;
}

ManualLabelOutcome apply_manual_label(Manifest& manifest, std::string_view record_id, std::string_view attribute,
                                      std::string_view value, std::string_view resolver,
                                      std::optional<std::string> now) {
  DatasetRecord* record = manifest.find(record_id);
  if (!record) throw NotFoundError("unknown record_id: " + std::string(record_id));
  const std::string attr(attribute);
  const auto label = record->downstream_labels.find(attr);
  if (label == record->downstream_labels.end())
    throw NotFoundError("record " + record->record_id + " has no label for attribute '" + attr + "'");
  const auto allowed = manifest.header.attributes.find(attr);
  if (allowed == manifest.header.attributes.end())
    throw NotFoundError("attribute '" + attr + "' is not declared in the manifest header");
  if (std::find(allowed->second.begin(), allowed->second.end(), value) == allowed->second.end())
    throw InvalidValueError(std::string(value), allowed->second);

  const bool already_manual = record->label_provenance[attr] == Provenance::manual;
  if (already_manual && label->second.value == value) return {review_item_for(*record, attr), false};

  const std::string stamp = now ? *now : utc_timestamp_now();
  auto& resolution = record->resolutions[attr];
  if (!already_manual) {
    resolution.auto_value = label->second.value;
    resolution.auto_confidence = label->second.confidence;
  }
  resolution.resolver = resolver;
  resolution.resolved_at = stamp;
  label->second = DownstreamLabel{std::string(value), 1.0};
  record->label_provenance[attr] = Provenance::manual;
  ++record->version;
  return {review_item_for(*record, attr), true};
}

}  // namespace fairgen
