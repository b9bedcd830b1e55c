#include "fairgen/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fairgen/errors.hpp"

namespace fairgen {

namespace {

using nlohmann::json;

// Field access that rejects unknown keys once every expected field was read.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(context_ + ": missing field \"" + key + "\"");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(raw(key), key);
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? convert<T>(j_.at(key), key) : fallback;
  }

  void allow(const std::string& key) { seen_.insert(key); }

  void expect_format(std::string_view format) {
    const auto f = get<std::string>("format");
    if (f != format) throw ConfigError(context_ + ": unsupported format \"" + f + "\" (want " + std::string(format) + ")");
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(context_ + ": unknown key \"" + key + "\"");
  }

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(context_ + ": field \"" + key + "\" has the wrong type");
    }
  }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

std::vector<double> numbers(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(context + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> strings(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(context + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json opt(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

}  // namespace

// ---- models ---------------------------------------------------------------

json to_json(const LinearModel& model) {
  const auto& m = model.meta;
  return {{"format", kLinearModelFormat},
          {"space_tag", to_string(model.space)},
          {"positive_class", model.positive_class},
          {"bias", model.bias},
          {"weights", model.weights},
          {"training_meta",
           {{"epochs_run", m.epochs_run},
            {"best_epoch", m.best_epoch},
            {"stopped_early", m.stopped_early},
            {"initial_loss", m.initial_loss},
            {"final_train_loss", m.final_train_loss},
            {"final_validation_loss", m.final_validation_loss},
            {"validation_losses", m.validation_losses},
            {"seed", m.seed}}}};
}

LinearModel linear_model_from_json(const json& j) {
  StrictObject o(j, "linear model");
  o.expect_format(kLinearModelFormat);
  LinearModel model;
  model.space = space_from_string(o.get<std::string>("space_tag"));
  model.positive_class = o.get<std::size_t>("positive_class");
  model.bias = o.get<double>("bias");
  model.weights = numbers(o.raw("weights"), "linear model weights");
  if (model.weights.empty()) throw ConfigError("linear model: weights must be non-empty");
  for (double w : model.weights)
    if (!std::isfinite(w)) throw ConfigError("linear model: non-finite weight");
  if (o.has("training_meta")) {
    StrictObject m(o.raw("training_meta"), "training_meta");
    auto& meta = model.meta;
    meta.epochs_run = m.get_or<std::size_t>("epochs_run", 0);
    meta.best_epoch = m.get_or<std::size_t>("best_epoch", 0);
    meta.stopped_early = m.get_or<bool>("stopped_early", false);
    meta.initial_loss = m.get_or<double>("initial_loss", 0.0);
    meta.final_train_loss = m.get_or<double>("final_train_loss", 0.0);
    meta.final_validation_loss = m.get_or<double>("final_validation_loss", 0.0);
    if (m.has("validation_losses")) meta.validation_losses = numbers(m.raw("validation_losses"), "validation_losses");
    meta.seed = m.get_or<std::uint64_t>("seed", 0);
    m.finish();
  }
  o.finish();
  return model;
}

json group_classifier_to_json(const GroupSet& groups, std::span<const LinearModel> models) {
  auto arr = json::array();
  for (const auto& m : models) arr.push_back(to_json(m));
  return {{"format", kGroupClassifierFormat}, {"groups", groups.names()}, {"models", std::move(arr)}};
}

std::pair<GroupSet, std::vector<LinearModel>> group_classifier_from_json(const json& j) {
  StrictObject o(j, "group classifier");
  o.expect_format(kGroupClassifierFormat);
  GroupSet groups(strings(o.raw("groups"), "group classifier groups"));
  std::vector<LinearModel> models;
  const auto& arr = o.raw("models");
  if (!arr.is_array()) throw ConfigError("group classifier: models must be an array");
  for (const auto& m : arr) models.push_back(linear_model_from_json(m));
  if (models.size() != groups.size()) throw ConfigError("group classifier: one model per group required");
  o.finish();
  return {std::move(groups), std::move(models)};
}

json to_json(const AttributeHead& head) {
  auto arr = json::array();
  for (const auto& m : head.models) arr.push_back(to_json(m));
  return {{"format", kAttributeHeadFormat},
          {"attribute_name", head.attribute_name},
          {"value_names", head.value_names},
          {"models", std::move(arr)}};
}

AttributeHead attribute_head_from_json(const json& j) {
  StrictObject o(j, "attribute head");
  o.expect_format(kAttributeHeadFormat);
  AttributeHead head;
  head.attribute_name = o.get<std::string>("attribute_name");
  head.value_names = strings(o.raw("value_names"), "attribute head value_names");
  const auto& arr = o.raw("models");
  if (!arr.is_array()) throw ConfigError("attribute head: models must be an array");
  for (const auto& m : arr) head.models.push_back(linear_model_from_json(m));
  o.finish();
  head.validate();
  return head;
}

// ---- configs --------------------------------------------------------------

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},       {"max_epochs", c.max_epochs},
          {"batch_size", c.batch_size},             {"early_stop_patience", c.early_stop_patience},
          {"validation_fraction", c.validation_fraction}, {"l2_penalty", c.l2_penalty},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
  StrictObject o(j, "training config");
  TrainConfig c;
  c.learning_rate = o.get_or("learning_rate", c.learning_rate);
  c.max_epochs = o.get_or("max_epochs", c.max_epochs);
  c.batch_size = o.get_or("batch_size", c.batch_size);
  c.early_stop_patience = o.get_or("early_stop_patience", c.early_stop_patience);
  c.validation_fraction = o.get_or("validation_fraction", c.validation_fraction);
  c.l2_penalty = o.get_or("l2_penalty", c.l2_penalty);
  c.seed = o.get_or("seed", c.seed);
  o.finish();
  c.validate();
  return c;
}

json to_json(const OracleConfig& c) {
  return {{"latent_dim", c.latent_dim},   {"feature_dim", c.feature_dim}, {"group_count", c.group_count},
          {"oracle_seed", c.oracle_seed}, {"skew_bias", c.skew_bias},     {"label_noise", c.label_noise},
          {"majority_group", c.majority_group}};
}

OracleConfig oracle_config_from_json(const json& j) {
  StrictObject o(j, "oracle config");
  OracleConfig c;
  c.latent_dim = o.get_or("latent_dim", c.latent_dim);
  c.feature_dim = o.get_or("feature_dim", c.feature_dim);
  c.group_count = o.get_or("group_count", c.group_count);
  c.oracle_seed = o.get_or("oracle_seed", c.oracle_seed);
  c.skew_bias = o.get_or("skew_bias", c.skew_bias);
  c.label_noise = o.get_or("label_noise", c.label_noise);
  c.majority_group = o.get_or("majority_group", c.majority_group);
  o.finish();
  c.validate();
  return c;
}

json to_json(const SteerPolicy& p) {
  return {{"mode", to_string(p.mode)}, {"alpha", p.alpha}};
}

SteerPolicy steer_policy_from_json(const json& j) {
  StrictObject o(j, "steer policy");
  SteerPolicy p;
  if (o.has("mode")) p.mode = steer_mode_from_string(o.get<std::string>("mode"));
  p.alpha = o.get_or("alpha", p.alpha);
  o.finish();
  p.validate();
  return p;
}

json to_json(const BalancePlan& p) {
  return {{"quota_per_group", p.quota_per_group},
          {"groups", p.groups},
          {"max_attempts_per_group", p.effective_max_attempts()},
          {"steer", to_json(p.steer_policy)},
          {"verify", p.verify},
          {"keep_rejects", p.keep_rejects},
          {"workers", p.workers},
          {"batch_size", p.batch_size}};
}

BalancePlan balance_plan_from_json(const json& j) {
  StrictObject o(j, "balance plan");
  BalancePlan p;
  p.quota_per_group = o.get_or("quota_per_group", p.quota_per_group);
  if (o.has("groups")) p.groups = o.raw("groups").get<std::vector<std::size_t>>();
  p.max_attempts_per_group = o.get_or("max_attempts_per_group", p.max_attempts_per_group);
  if (o.has("steer")) p.steer_policy = steer_policy_from_json(o.raw("steer"));
  p.verify = o.get_or("verify", p.verify);
  p.keep_rejects = o.get_or("keep_rejects", p.keep_rejects);
  p.workers = o.get_or("workers", p.workers);
  p.batch_size = o.get_or("batch_size", p.batch_size);
  o.finish();
  p.validate();
  return p;
}

// ---- reports, records -----------------------------------------------------

json to_json(const DistributionReport& r) {
  auto groups = json::array();
  for (std::size_t i = 0; i < r.groups.size(); ++i) {
    const auto& g = r.groups[i];
    json entry = {{"index", g.group.index}, {"name", g.group.name}, {"count", g.count}, {"percentage", r.percentage(i)}};
    if (g.attempts) {
      entry["attempts"] = *g.attempts;
      entry["acceptance_rate"] = *g.attempts == 0 ? 0.0 : static_cast<double>(g.count) / static_cast<double>(*g.attempts);
    }
    groups.push_back(std::move(entry));
  }
  return {{"format", kReportFormat}, {"mode", to_string(r.mode)}, {"seed", r.seed}, {"total", r.total}, {"groups", groups}};
}

DistributionReport distribution_report_from_json(const json& j) {
  StrictObject o(j, "distribution report");
  o.expect_format(kReportFormat);
  DistributionReport r;
  r.mode = report_mode_from_string(o.get<std::string>("mode"));
  r.seed = o.get<std::uint64_t>("seed");
  const auto total = o.get<std::size_t>("total");
  const auto& groups = o.raw("groups");
  if (!groups.is_array()) throw ConfigError("distribution report: groups must be an array");
  for (const auto& g : groups) {
    StrictObject e(g, "distribution report group");
    GroupTally t{GroupLabel{e.get<std::size_t>("index"), e.get<std::string>("name")}, e.get<std::size_t>("count"),
                 std::nullopt};
    if (e.has("attempts")) t.attempts = e.get<std::size_t>("attempts");
    e.allow("percentage");
    e.allow("acceptance_rate");
    e.finish();
    r.groups.push_back(std::move(t));
  }
  r.total = total;
  o.finish();
  return r;
}

json to_json(const DatasetRecord& r) {
  json labels = json::object(), provenance = json::object();
  for (const auto& [k, v] : r.downstream_labels) labels[k] = {{"value", v.value}, {"confidence", v.confidence}};
  for (const auto& [k, v] : r.label_provenance) provenance[k] = to_string(v);
  json j = {{"kind", "record"},
            {"record_id", r.record_id},
            {"version", r.version},
            {"latent", r.latent.to_vector()},
            {"feature", r.feature.to_vector()},
            {"image_ref", opt(r.image_ref)},
            {"group", r.group.index},
            {"group_confidence", r.group_confidence},
            {"steered_toward", r.steered_toward ? json(r.steered_toward->index) : json(nullptr)},
            {"downstream_labels", std::move(labels)},
            {"label_provenance", std::move(provenance)},
            {"created_at", r.created_at}};
  if (r.rejected) j["rejected"] = true;
  if (!r.resolutions.empty()) {
    json res = json::object();
    for (const auto& [k, v] : r.resolutions)
      res[k] = {{"resolver", v.resolver},
                {"resolved_at", v.resolved_at},
                {"auto_value", v.auto_value},
                {"auto_confidence", v.auto_confidence}};
    j["resolutions"] = std::move(res);
  }
  return j;
}

DatasetRecord dataset_record_from_json(const json& j, const GroupSet& groups) {
  StrictObject o(j, "record");
  if (o.get<std::string>("kind") != "record") throw ConfigError("record: kind must be \"record\"");
  auto vec = [&](const char* key) {
    auto v = numbers(o.raw(key), std::string("record ") + key);
    return v;
  };
  DatasetRecord r{.record_id = o.get<std::string>("record_id"),
                  .version = o.get<std::uint64_t>("version"),
                  .latent = LatentVector(vec("latent")),
                  .feature = FeatureVector(vec("feature")),
                  .image_ref = std::nullopt,
                  .group = groups.at(o.get<std::size_t>("group")),
                  .group_confidence = o.get<double>("group_confidence"),
                  .steered_toward = std::nullopt,
                  .rejected = o.get_or("rejected", false),
                  .downstream_labels = {},
                  .label_provenance = {},
                  .resolutions = {},
                  .created_at = o.get<std::string>("created_at")};
  if (r.record_id.empty()) throw ConfigError("record: empty record_id");
  if (o.has("image_ref")) r.image_ref = o.get<std::string>("image_ref");
  if (o.has("steered_toward")) r.steered_toward = groups.at(o.get<std::size_t>("steered_toward"));
  for (const auto& [k, v] : o.raw("downstream_labels").items()) {
    StrictObject l(v, "downstream label");
    r.downstream_labels[k] = DownstreamLabel{l.get<std::string>("value"), l.get<double>("confidence")};
    l.finish();
  }
  for (const auto& [k, v] : o.raw("label_provenance").items()) {
    if (!v.is_string()) throw ConfigError("record: provenance must be a string");
    r.label_provenance[k] = provenance_from_string(v.get<std::string>());
  }
  for (const auto& [k, _] : r.downstream_labels)
    if (!r.label_provenance.count(k)) throw ConfigError("record: label '" + k + "' has no provenance");
  if (o.has("resolutions")) {
    for (const auto& [k, v] : o.raw("resolutions").items()) {
      StrictObject m(v, "resolution");
      r.resolutions[k] = ManualResolution{m.get<std::string>("resolver"), m.get<std::string>("resolved_at"),
                                          m.get<std::string>("auto_value"), m.get<double>("auto_confidence")};
      m.finish();
    }
  }
  o.finish();
  return r;
}

json to_json(const ManifestHeader& h) {
  json attributes = json::object();
  for (const auto& [k, v] : h.attributes) attributes[k] = v;
  return {{"kind", "header"},
          {"format", kManifestFormat},
          {"latent_dim", h.latent_dim},
          {"feature_dim", h.feature_dim},
          {"groups", h.groups.names()},
          {"root_seed", h.root_seed},
          {"created_at", h.created_at},
          {"rng", h.rng_algorithm},
          {"workers", h.workers},
          {"generator", h.generator},
          {"config", h.config},
          {"attributes", std::move(attributes)}};
}

ManifestHeader manifest_header_from_json(const json& j) {
  StrictObject o(j, "manifest header");
  if (o.get<std::string>("kind") != "header") throw ConfigError("manifest header: kind must be \"header\"");
  o.expect_format(kManifestFormat);
  ManifestHeader h;
  h.latent_dim = o.get<std::size_t>("latent_dim");
  h.feature_dim = o.get<std::size_t>("feature_dim");
  h.groups = GroupSet(strings(o.raw("groups"), "manifest groups"));
  h.root_seed = o.get<std::uint64_t>("root_seed");
  h.created_at = o.get<std::string>("created_at");
  h.rng_algorithm = o.get_or<std::string>("rng", "");
  h.workers = o.get_or<std::size_t>("workers", 1);
  if (o.has("generator")) h.generator = o.raw("generator");
  if (o.has("config")) h.config = o.raw("config");
  if (o.has("attributes")) {
    const auto& a = o.raw("attributes");
    if (!a.is_object()) throw ConfigError("manifest header: attributes must be an object");
    for (const auto& [k, v] : a.items()) h.attributes[k] = strings(v, "attribute values");
  }
  o.finish();
  return h;
}

json to_json(const ReviewItem& item) {
  return {{"record_id", item.record_id},
          {"attribute", item.attribute_name},
          {"auto_value", item.auto_value},
          {"confidence", item.confidence},
          {"status", to_string(item.status)},
          {"resolved_value", opt(item.resolved_value)},
          {"resolver", opt(item.resolver)},
          {"resolved_at", opt(item.resolved_at)}};
}

ReviewItem review_item_from_json(const json& j) {
  StrictObject o(j, "review item");
  ReviewItem item;
  item.record_id = o.get<std::string>("record_id");
  item.attribute_name = o.get<std::string>("attribute");
  item.auto_value = o.get<std::string>("auto_value");
  item.confidence = o.get<double>("confidence");
  const auto status = o.get<std::string>("status");
  if (status == "resolved") item.status = ReviewStatus::resolved;
  else if (status != "pending") throw ConfigError("review item: unknown status " + status);
  if (o.has("resolved_value")) item.resolved_value = o.get<std::string>("resolved_value");
  if (o.has("resolver")) item.resolver = o.get<std::string>("resolver");
  if (o.has("resolved_at")) item.resolved_at = o.get<std::string>("resolved_at");
  o.finish();
  if ((item.status == ReviewStatus::resolved) != item.resolved_value.has_value())
    throw ConfigError("review item: resolved_value must be present exactly when resolved");
  return item;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace fairgen
