#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairgen/classifier.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/groups.hpp"
#include "fairgen/record.hpp"
#include "fairgen/steering.hpp"

namespace fairgen {

enum class ReportMode { unguided, guided };

std::string_view to_string(ReportMode mode);
ReportMode report_mode_from_string(std::string_view text);

struct GroupTally {
  GroupLabel group;
  std::size_t count = 0;
  /// Guided runs only: samples evaluated to reach `count`.
  std::optional<std::size_t> attempts;

  friend bool operator==(const GroupTally&, const GroupTally&) = default;
};

/// Per-group counts of one run. Percentages are always derived from counts.
struct DistributionReport {
  ReportMode mode = ReportMode::unguided;
  std::uint64_t seed = 0;
  std::vector<GroupTally> groups;
  std::size_t total = 0;

  /// 100 * count / total (0 when total is 0).
  double percentage(std::size_t i) const;

  /// True when the counts add up to `total`. Always the case for reports the
  /// pipeline produces; tallies copied from elsewhere may carry a stated
  /// denominator that disagrees with their counts.
  bool consistent() const;

  /// Builds a report whose total is the sum of `counts`, or `stated_total`
  /// when given (the number of samples the tally claims to cover).
  static DistributionReport from_counts(ReportMode mode, std::uint64_t seed, std::span<const GroupLabel> groups,
                                        std::span<const std::size_t> counts,
                                        std::span<const std::size_t> attempts = {},
                                        std::optional<std::size_t> stated_total = std::nullopt);

  friend bool operator==(const DistributionReport&, const DistributionReport&) = default;
};

/// accepted / attempted per group of a guided report. Throws ConfigError
/// when a group carries no attempt count.
std::vector<double> acceptance_rates(const DistributionReport& report);

struct SurveyOptions {
  std::size_t samples = 10000;
  std::size_t batch_size = 256;
  bool keep_records = false;
};

struct SurveyResult {
  DistributionReport report;
  /// Filled when SurveyOptions::keep_records is set.
  std::vector<DatasetRecord> records;
};

/// Unguided sampling: draw latents, generate, classify with the feature-space
/// models, tally. Throws MissingGroupError when a group has no model.
SurveyResult survey_unguided(const SurveyOptions& options, const Generator& generator,
                             std::span<const LinearModel> feature_models, const GroupSet& groups, RngHandle& rng,
                             RecordIdGenerator* ids = nullptr);

struct BalancePlan {
  std::size_t quota_per_group = 100;
  /// Group indices to fill; empty means every group.
  std::vector<std::size_t> groups;
  /// 0 means 50 * quota_per_group.
  std::size_t max_attempts_per_group = 0;
  SteerPolicy steer_policy;
  bool verify = true;
  bool keep_rejects = false;
  /// Worker threads; runs are deterministic only with 1.
  std::size_t workers = 1;
  std::size_t batch_size = 32;

  std::size_t effective_max_attempts() const {
    return max_attempts_per_group == 0 ? 50 * quota_per_group : max_attempts_per_group;
  }
  void validate() const;

  friend bool operator==(const BalancePlan&, const BalancePlan&) = default;
};

struct BalancedResult {
  /// Accepted records grouped by plan order (plus flagged rejects when kept).
  std::vector<DatasetRecord> records;
  DistributionReport report;
};

/// Guided generation with verification: for each planned group, sample z,
/// steer it along that group's latent probe, generate, classify, and keep it
/// only when the classifier agrees (or verification is off), until exactly
/// quota_per_group are accepted.
///
/// Throws QuotaUnreachableError(group, accepted, attempts) once a group uses
/// up max_attempts_per_group without filling its quota.
BalancedResult generate_balanced(const BalancePlan& plan, const Generator& generator,
                                 std::span<const LinearModel> latent_probes,
                                 std::span<const LinearModel> feature_models, const GroupSet& groups,
                                 RngHandle& rng, RecordIdGenerator* ids = nullptr);

}  // namespace fairgen
