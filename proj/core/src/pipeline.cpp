#include "fairgen/pipeline.hpp"

#include <exception>
#include <mutex>
#include <thread>

#include "fairgen/errors.hpp"

namespace fairgen {

std::string_view to_string(ReportMode mode) {
  return mode == ReportMode::unguided ? "unguided" : "guided";
}

ReportMode report_mode_from_string(std::string_view text) {
  if (text == "unguided") return ReportMode::unguided;
  if (text == "guided") return ReportMode::guided;
  throw ConfigError("unknown report mode: " + std::string(text));
}

double DistributionReport::percentage(std::size_t i) const {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(groups.at(i).count) / static_cast<double>(total);
}

DistributionReport DistributionReport::from_counts(ReportMode mode, std::uint64_t seed,
                                                   std::span<const GroupLabel> groups,
                                                   std::span<const std::size_t> counts,
                                                   std::span<const std::size_t> attempts,
                                                   std::optional<std::size_t> stated_total) {
  if (counts.size() != groups.size()) throw DimensionMismatchError(groups.size(), counts.size(), "report counts");
  if (!attempts.empty() && attempts.size() != groups.size())
    throw DimensionMismatchError(groups.size(), attempts.size(), "report attempts");
  DistributionReport report;
  report.mode = mode;
  report.seed = seed;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    GroupTally tally{groups[i], counts[i], std::nullopt};
    if (!attempts.empty()) tally.attempts = attempts[i];
    report.groups.push_back(std::move(tally));
    report.total += counts[i];
  }
  if (stated_total) report.total = *stated_total;
  return report;
}

bool DistributionReport::consistent() const {
  std::size_t sum = 0;
  for (const auto& g : groups) sum += g.count;
  return sum == total;
}

std::vector<double> acceptance_rates(const DistributionReport& report) {
  std::vector<double> rates;
  for (const auto& g : report.groups) {
    if (!g.attempts) throw ConfigError("acceptance rates need attempt counts (guided report)");
    rates.push_back(*g.attempts == 0 ? 0.0 : static_cast<double>(g.count) / static_cast<double>(*g.attempts));
  }
  return rates;
}

void BalancePlan::validate() const {
  if (quota_per_group == 0) throw ConfigError("plan quota must be >= 1");
  if (effective_max_attempts() < quota_per_group) throw ConfigError("plan max_attempts must be >= quota");
  if (workers == 0) throw ConfigError("plan workers must be >= 1");
  if (batch_size == 0) throw ConfigError("plan batch_size must be >= 1");
  steer_policy.validate();
}

namespace {

constexpr std::uint64_t kIdStreamSalt = 0x1d5eed1d5eedULL;

void check_feature_models(std::span<const LinearModel> models, const GroupSet& groups) {
  for (std::size_t k = 0; k < groups.size(); ++k) {
    bool found = false;
    for (const auto& m : models) {
      if (m.space != Space::feature)
        throw WrongSpaceError("group classifier models must be feature-space models");
      found = found || m.positive_class == k;
    }
    if (!found) throw MissingGroupError(k, groups.name(k));
  }
}

const LinearModel& probe_for(std::span<const LinearModel> probes, std::size_t k, const GroupSet& groups) {
  for (const auto& p : probes)
    if (p.positive_class == k) return p;
  throw MissingGroupError(k, groups.name(k));
}

DatasetRecord make_record(std::string id, LatentVector z, GeneratedSample sample, const GroupPrediction& pred,
                          const GroupSet& groups, std::optional<GroupLabel> steered, bool rejected) {
  return DatasetRecord{.record_id = std::move(id),
                       .version = 1,
                       .latent = std::move(z),
                       .feature = std::move(sample.feature),
                       .image_ref = std::move(sample.image_ref),
                       .group = groups.at(pred.group),
                       .group_confidence = pred.confidence,
                       .steered_toward = std::move(steered),
                       .rejected = rejected,
                       .downstream_labels = {},
                       .label_provenance = {},
                       .resolutions = {},
                       .created_at = utc_timestamp_now()};
}

}  // namespace

SurveyResult survey_unguided(const SurveyOptions& options, const Generator& generator,
                             std::span<const LinearModel> feature_models, const GroupSet& groups, RngHandle& rng,
                             RecordIdGenerator* ids) {
  if (options.samples == 0) throw ConfigError("survey sample count must be >= 1");
  if (options.batch_size == 0) throw ConfigError("survey batch_size must be >= 1");
  if (feature_models.empty()) throw MissingGroupError(0, groups.name(0));
  check_feature_models(feature_models, groups);
  RecordIdGenerator local_ids(rng.seed() ^ kIdStreamSalt);
  if (!ids) ids = &local_ids;

  std::vector<std::size_t> counts(groups.size(), 0);
  SurveyResult result;
  std::vector<LatentVector> batch;
  for (std::size_t done = 0; done < options.samples;) {
    const std::size_t b = std::min(options.batch_size, options.samples - done);
    batch.clear();
    for (std::size_t i = 0; i < b; ++i) batch.push_back(sample_latent(rng, generator.latent_dim()));
    auto samples = generator.generate(batch);
    for (std::size_t i = 0; i < b; ++i) {
      const auto pred = predict_group(feature_models, samples[i].feature.values());
      ++counts[pred.group];
      if (options.keep_records)
        result.records.push_back(
            make_record(ids->next(), batch[i], std::move(samples[i]), pred, groups, std::nullopt, false));
    }
    done += b;
  }
  std::vector<GroupLabel> labels;
  for (std::size_t k = 0; k < groups.size(); ++k) labels.push_back(groups.at(k));
  result.report = DistributionReport::from_counts(ReportMode::unguided, rng.seed(), labels, counts);
  return result;
}

namespace {

// The single authority on how many samples a group has accepted. Workers
// propose batches; proposals past the quota are dropped.
class QuotaLedger {
 public:
  QuotaLedger(std::size_t quota, std::size_t max_attempts) : quota_(quota), max_attempts_(max_attempts) {}

  template <class Evaluate>
  void offer(std::size_t batch_size, Evaluate&& evaluate) {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < batch_size; ++i) {
      if (done_locked()) return;
      ++attempts_;
      if (evaluate(i)) ++accepted_;
    }
  }

  bool done() const {
    std::lock_guard lock(mutex_);
    return done_locked();
  }
  std::size_t accepted() const {
    std::lock_guard lock(mutex_);
    return accepted_;
  }
  std::size_t attempts() const {
    std::lock_guard lock(mutex_);
    return attempts_;
  }
  std::size_t remaining_attempts() const {
    std::lock_guard lock(mutex_);
    return max_attempts_ - attempts_;
  }

 private:
  bool done_locked() const { return accepted_ >= quota_ || attempts_ >= max_attempts_; }

  mutable std::mutex mutex_;
  std::size_t quota_;
  std::size_t max_attempts_;
  std::size_t accepted_ = 0;
  std::size_t attempts_ = 0;
};

}  // namespace

BalancedResult generate_balanced(const BalancePlan& plan, const Generator& generator,
                                 std::span<const LinearModel> latent_probes,
                                 std::span<const LinearModel> feature_models, const GroupSet& groups,
                                 RngHandle& rng, RecordIdGenerator* ids) {
  plan.validate();
  check_feature_models(feature_models, groups);
  RecordIdGenerator local_ids(rng.seed() ^ kIdStreamSalt);
  if (!ids) ids = &local_ids;

  std::vector<std::size_t> targets = plan.groups;
  if (targets.empty())
    for (std::size_t k = 0; k < groups.size(); ++k) targets.push_back(k);

  const std::size_t d = generator.latent_dim();
  std::vector<SteerDirection> directions;
  for (auto k : targets) {
    groups.name(k);
    const auto& probe = probe_for(latent_probes, k, groups);
    if (probe.weights.size() != d) throw DimensionMismatchError(d, probe.weights.size(), "latent probe");
    directions.push_back(direction_from_model(probe, groups.at(k), "probe/" + groups.name(k)));
  }

  const std::size_t max_attempts = plan.effective_max_attempts();
  std::vector<RngHandle> worker_rngs;
  if (plan.workers == 1) {
    worker_rngs.push_back(rng);
  } else {
    for (std::size_t w = 0; w < plan.workers; ++w) worker_rngs.push_back(rng.split(w));
  }

  BalancedResult result;
  std::vector<std::size_t> accepted_counts, attempt_counts;
  std::mutex records_mutex;

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t k = targets[t];
    const auto& dir = directions[t];
    QuotaLedger ledger(plan.quota_per_group, max_attempts);
    std::vector<DatasetRecord> accepted_records, rejected_records;

    auto work = [&](RngHandle& wrng) {
      std::vector<LatentVector> batch;
      while (!ledger.done()) {
        const std::size_t b = std::min(plan.batch_size, ledger.remaining_attempts());
        if (b == 0) break;
        batch.clear();
        for (std::size_t i = 0; i < b; ++i) batch.push_back(steer(sample_latent(wrng, d), dir, plan.steer_policy));
        auto samples = generator.generate(batch);
        if (samples.size() != b) throw ProtocolError("generator returned a short batch", samples.size());
        ledger.offer(b, [&](std::size_t i) {
          const auto pred = predict_group(feature_models, samples[i].feature.values());
          const bool ok = !plan.verify || pred.group == k;
          if (ok || plan.keep_rejects) {
            auto rec = make_record(ids->next(), batch[i], std::move(samples[i]), pred, groups, dir.group, !ok);
            std::lock_guard lock(records_mutex);
            (ok ? accepted_records : rejected_records).push_back(std::move(rec));
          }
          return ok;
        });
      }
    };

    if (plan.workers == 1) {
      work(worker_rngs.front());
    } else {
      std::vector<std::exception_ptr> errors(plan.workers);
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < plan.workers; ++w)
        threads.emplace_back([&, w] {
          try {
            work(worker_rngs[w]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& th : threads) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    if (ledger.accepted() < plan.quota_per_group)
      throw QuotaUnreachableError(k, ledger.accepted(), ledger.attempts());

    accepted_counts.push_back(ledger.accepted());
    attempt_counts.push_back(ledger.attempts());
    for (auto& r : accepted_records) result.records.push_back(std::move(r));
    for (auto& r : rejected_records) result.records.push_back(std::move(r));
  }
  if (plan.workers == 1) rng = worker_rngs.front();

  std::vector<GroupLabel> labels;
  for (auto k : targets) labels.push_back(groups.at(k));
  result.report =
      DistributionReport::from_counts(ReportMode::guided, rng.seed(), labels, accepted_counts, attempt_counts);
  return result;
}

}  // namespace fairgen
