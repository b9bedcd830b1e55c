#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "fairgen/classifier.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/labeling.hpp"
#include "fairgen/manifest.hpp"
#include "fairgen/pipeline.hpp"
#include "fairgen/steering.hpp"

// JSON encodings of every persisted type. Decoders throw ConfigError on
// missing or ill-typed fields and on unknown keys.
namespace fairgen {

inline constexpr std::string_view kLinearModelFormat = "linear-model/1";
inline constexpr std::string_view kGroupClassifierFormat = "group-classifier/1";
inline constexpr std::string_view kAttributeHeadFormat = "attribute-head/1";
inline constexpr std::string_view kReportFormat = "distribution-report/1";

nlohmann::json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const nlohmann::json& j);

/// Feature-space group classifier: group names plus one model per group.
nlohmann::json group_classifier_to_json(const GroupSet& groups, std::span<const LinearModel> models);
std::pair<GroupSet, std::vector<LinearModel>> group_classifier_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttributeHead& head);
AttributeHead attribute_head_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OracleConfig& cfg);
OracleConfig oracle_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SteerPolicy& policy);
SteerPolicy steer_policy_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BalancePlan& plan);
BalancePlan balance_plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DistributionReport& report);
DistributionReport distribution_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetRecord& record);
/// `line` is used only in error messages.
DatasetRecord dataset_record_from_json(const nlohmann::json& j, const GroupSet& groups);

nlohmann::json to_json(const ManifestHeader& header);
ManifestHeader manifest_header_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReviewItem& item);
ReviewItem review_item_from_json(const nlohmann::json& j);

/// Reads and parses a JSON file; IoError / ConfigError on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes `j` pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace fairgen
