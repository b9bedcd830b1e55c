#include "fairgen/config.hpp"

#include <set>

#include "fairgen/errors.hpp"
#include "fairgen/serialization.hpp"

namespace fairgen {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> keys, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  const std::set<std::string_view> known(keys);
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw ConfigError(context + ": unknown key \"" + k + "\"");
}

template <class T>
T field(const json& j, const char* key, T fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  bool ok = true;
  if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
  else if constexpr (std::is_unsigned_v<T>) ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer();
  else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
  if (!ok) throw ConfigError(context + "." + key + " has the wrong type");
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(context + "." + key + " has the wrong type");
  }
}

}  // namespace

GroupSet RunConfig::groups() const {
  return group_names.empty() ? GroupSet::defaults(oracle.group_count) : GroupSet(group_names);
}

void RunConfig::validate() const {
  oracle.validate();
  feature_training.validate();
  probe_training.validate();
  head_training.validate();
  plan.validate();
  const auto g = groups();
  if (generator.kind == GeneratorKind::oracle && g.size() != oracle.group_count)
    throw ConfigError("groups: " + std::to_string(g.size()) + " names for an oracle with " +
                      std::to_string(oracle.group_count) + " groups");
  for (auto k : plan.groups)
    if (k >= g.size()) throw ConfigError("plan.groups: index " + std::to_string(k) + " out of range");
  if (!(labeling.threshold >= 0.0 && labeling.threshold <= 1.0))
    throw ConfigError("labeling.threshold must lie in [0, 1]");
  std::set<std::string> names;
  for (const auto& a : labeling.attributes) {
    if (a.name.empty() || !names.insert(a.name).second) throw ConfigError("labeling.attributes: names must be unique");
    if (a.values.size() != 2) throw ConfigError("labeling.attributes: oracle-backed attributes are binary");
  }
  if (training_samples < 2) throw ConfigError("training_samples must be >= 2");
  if (generator.batch_size == 0) throw ConfigError("generator.batch_size must be >= 1");
  if (review.port < 0 || review.port > 65535) throw ConfigError("review.port out of range");
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j,
                 {"format", "seed", "groups", "generator", "oracle", "feature_training", "probe_training",
                  "head_training", "training_samples", "survey", "plan", "labeling", "review", "artifacts"},
                 "config");
  if (!j.contains("format") || !j["format"].is_string() || j["format"].get<std::string>() != kConfigFormat)
    throw ConfigError("config: \"format\" must be \"" + std::string(kConfigFormat) + "\"");

  RunConfig c;
  c.seed = field(j, "seed", c.seed, "config");
  c.group_names = field(j, "groups", c.group_names, "config");
  if (j.contains("oracle")) c.oracle = oracle_config_from_json(j["oracle"]);

  if (j.contains("generator")) {
    const auto& g = j["generator"];
    reject_unknown(g, {"kind", "endpoint", "latent_dim", "feature_dim", "attempts", "timeout_ms", "backoff_ms", "batch_size"},
                   "generator");
    const auto kind = field<std::string>(g, "kind", "oracle", "generator");
    if (kind == "oracle") c.generator.kind = GeneratorKind::oracle;
    else if (kind == "http") c.generator.kind = GeneratorKind::http;
    else throw ConfigError("generator.kind must be \"oracle\" or \"http\"");
    auto& h = c.generator.http;
    h.endpoint = field(g, "endpoint", h.endpoint, "generator");
    h.latent_dim = field(g, "latent_dim", c.oracle.latent_dim, "generator");
    h.feature_dim = field(g, "feature_dim", h.feature_dim, "generator");
    h.attempts = field(g, "attempts", h.attempts, "generator");
    h.timeout = std::chrono::milliseconds(field<long>(g, "timeout_ms", h.timeout.count(), "generator"));
    h.backoff = std::chrono::milliseconds(field<long>(g, "backoff_ms", h.backoff.count(), "generator"));
    c.generator.batch_size = field(g, "batch_size", c.generator.batch_size, "generator");
    if (c.generator.kind == GeneratorKind::http && h.endpoint.empty())
      throw ConfigError("generator.endpoint is required for kind \"http\"");
  }
  if (c.generator.kind == GeneratorKind::oracle) c.generator.http.latent_dim = c.oracle.latent_dim;

  if (j.contains("feature_training")) c.feature_training = train_config_from_json(j["feature_training"]);
  if (j.contains("probe_training")) c.probe_training = train_config_from_json(j["probe_training"]);
  if (j.contains("head_training")) c.head_training = train_config_from_json(j["head_training"]);
  c.training_samples = field(j, "training_samples", c.training_samples, "config");

  if (j.contains("survey")) {
    const auto& s = j["survey"];
    reject_unknown(s, {"samples", "batch_size"}, "survey");
    c.survey.samples = field(s, "samples", c.survey.samples, "survey");
    c.survey.batch_size = field(s, "batch_size", c.survey.batch_size, "survey");
  }
  if (j.contains("plan")) c.plan = balance_plan_from_json(j["plan"]);

  if (j.contains("labeling")) {
    const auto& l = j["labeling"];
    reject_unknown(l, {"threshold", "attributes"}, "labeling");
    c.labeling.threshold = field(l, "threshold", c.labeling.threshold, "labeling");
    if (l.contains("attributes")) {
      c.labeling.attributes.clear();
      for (const auto& a : l["attributes"]) {
        reject_unknown(a, {"name", "values"}, "labeling.attributes");
        c.labeling.attributes.push_back(
            {field<std::string>(a, "name", "", "labeling.attributes"),
             field<std::vector<std::string>>(a, "values", {}, "labeling.attributes")});
      }
    }
  }
  if (j.contains("review")) {
    const auto& r = j["review"];
    reject_unknown(r, {"host", "port"}, "review");
    c.review.host = field(r, "host", c.review.host, "review");
    c.review.port = field(r, "port", c.review.port, "review");
  }
  if (j.contains("artifacts")) {
    const auto& a = j["artifacts"];
    reject_unknown(a, {"classifier", "probes", "heads"}, "artifacts");
    c.artifacts.classifier = field<std::string>(a, "classifier", c.artifacts.classifier.string(), "artifacts");
    c.artifacts.probes = field<std::string>(a, "probes", c.artifacts.probes.string(), "artifacts");
    c.artifacts.heads = field<std::string>(a, "heads", c.artifacts.heads.string(), "artifacts");
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json attributes = json::array();
  for (const auto& a : c.labeling.attributes) attributes.push_back({{"name", a.name}, {"values", a.values}});
  const auto& h = c.generator.http;
  return {{"format", kConfigFormat},
          {"seed", c.seed},
          {"groups", c.groups().names()},
          {"generator",
           {{"kind", c.generator.kind == GeneratorKind::oracle ? "oracle" : "http"},
            {"endpoint", h.endpoint},
            {"latent_dim", h.latent_dim},
            {"feature_dim", h.feature_dim},
            {"attempts", h.attempts},
            {"timeout_ms", h.timeout.count()},
            {"backoff_ms", h.backoff.count()},
            {"batch_size", c.generator.batch_size}}},
          {"oracle", to_json(c.oracle)},
          {"feature_training", to_json(c.feature_training)},
          {"probe_training", to_json(c.probe_training)},
          {"head_training", to_json(c.head_training)},
          {"training_samples", c.training_samples},
          {"survey", {{"samples", c.survey.samples}, {"batch_size", c.survey.batch_size}}},
          {"plan", to_json(c.plan)},
          {"labeling", {{"threshold", c.labeling.threshold}, {"attributes", std::move(attributes)}}},
          {"review", {{"host", c.review.host}, {"port", c.review.port}}},
          {"artifacts",
           {{"classifier", c.artifacts.classifier.string()},
            {"probes", c.artifacts.probes.string()},
            {"heads", c.artifacts.heads.string()}}}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path));
}

std::unique_ptr<Generator> make_generator(const RunConfig& config) {
  if (config.generator.kind == GeneratorKind::http) return std::make_unique<HttpGenerator>(config.generator.http);
  return std::make_unique<OracleGenerator>(Oracle(config.oracle));
}

}  // namespace fairgen
