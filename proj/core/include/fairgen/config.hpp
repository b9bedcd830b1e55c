#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairgen/classifier.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/groups.hpp"
#include "fairgen/labeling.hpp"
#include "fairgen/pipeline.hpp"

namespace fairgen {

inline constexpr std::string_view kConfigFormat = "fairgen-config/1";

enum class GeneratorKind { oracle, http };

struct GeneratorSection {
  GeneratorKind kind = GeneratorKind::oracle;
  HttpGeneratorOptions http;
  std::size_t batch_size = 64;
};

struct AttributeSchema {
  std::string name;
  std::vector<std::string> values;
  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

struct LabelingSection {
  double threshold = kDefaultReviewThreshold;
  /// Binary attributes backed, in order, by the oracle's hidden attribute functionals.
  std::vector<AttributeSchema> attributes{
      {"smile", {"no", "yes"}}, {"eye_state", {"closed", "open"}}, {"gender", {"female", "male"}}};
};

struct ReviewSection {
  std::string host = "127.0.0.1";
  int port = 8080;
};

struct ArtifactPaths {
  std::filesystem::path classifier = "model.json";
  std::filesystem::path probes = "probes";
  std::filesystem::path heads = "heads";
};

/// Every tunable of a run, one named section per module.
struct RunConfig {
  std::uint64_t seed = 42;
  std::vector<std::string> group_names;  ///< empty: defaults sized to the oracle
  GeneratorSection generator;
  OracleConfig oracle;
  TrainConfig feature_training;
  TrainConfig probe_training;
  TrainConfig head_training;
  /// Oracle samples drawn to train the group classifier and attribute heads.
  std::size_t training_samples = 5000;
  SurveyOptions survey;
  BalancePlan plan;
  LabelingSection labeling;
  ReviewSection review;
  ArtifactPaths artifacts;

  GroupSet groups() const;
  /// Cross-section checks; throws ConfigError.
  void validate() const;
};

/// Parses a config object. Unknown keys anywhere raise ConfigError, as does a
/// missing or wrong "format".
RunConfig run_config_from_json(const nlohmann::json& j);
/// The fully resolved configuration (every default spelled out).
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

std::unique_ptr<Generator> make_generator(const RunConfig& config);

}  // namespace fairgen
