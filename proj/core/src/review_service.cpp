#include "fairgen/review_service.hpp"

#include <mutex>
#include <shared_mutex>

#include <httplib.h>

#include "fairgen/errors.hpp"
#include "fairgen/manifest.hpp"
#include "fairgen/report.hpp"
#include "fairgen/serialization.hpp"

namespace fairgen {

using nlohmann::json;

struct ReviewService::Impl {
  ReviewServiceOptions options;
  std::filesystem::path audit_path;
  mutable std::shared_mutex mutex;
  Manifest manifest;
  ManifestAppender appender;
  httplib::Server server;

  explicit Impl(ReviewServiceOptions opts)
      : options(std::move(opts)),
        audit_path(options.audit_log.value_or(std::filesystem::path(options.manifest.string() + ".audit.jsonl"))),
        manifest(read_manifest(options.manifest)),
        appender(options.manifest) {}

  json queue_entry(const ReviewItem& item) const {
    json j = to_json(item);
    const auto* record = manifest.find(item.record_id);
    const auto allowed = manifest.header.attributes.find(item.attribute_name);
    j["allowed_values"] = allowed == manifest.header.attributes.end() ? json::array() : json(allowed->second);
    if (record && record->image_ref) {
      j["preview"] = {{"image_ref", *record->image_ref}};
    } else if (record) {
      j["preview"] = {{"features", record->feature.to_vector()}};
    }
    return j;
  }
};

namespace {

json error_body(const std::string& message) {
  return {{"error", message}};
}

}  // namespace

ReviewService::ReviewService(ReviewServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  auto& svr = impl_->server;
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };

  svr.Get("/api/queue", [this, reply](const httplib::Request& req, httplib::Response& res) {
    auto number = [&](const char* key, std::size_t fallback) -> std::optional<std::size_t> {
      if (!req.has_param(key)) return fallback;
      try {
        const std::string text = req.get_param_value(key);
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size() || v < 0) return std::nullopt;
        return static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    };
    const auto limit = number("limit", 50);
    const auto offset = number("offset", 0);
    if (!limit || !offset) {
      reply(res, {400, error_body("limit and offset must be non-negative integers")});
      return;
    }
    reply(res, get_queue(*limit, *offset));
  });

  svr.Post("/api/label", [this, reply](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      reply(res, {400, error_body("request body is not valid JSON")});
      return;
    }
    reply(res, post_label(body));
  });

  svr.Get("/api/stats", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, get_stats()); });

  if (impl_->options.static_dir && std::filesystem::is_directory(*impl_->options.static_dir))
    svr.set_mount_point("/", impl_->options.static_dir->string());
}

ReviewService::~ReviewService() {
  stop();
}

ReviewService::Response ReviewService::get_queue(std::size_t limit, std::size_t offset) const {
  std::shared_lock lock(impl_->mutex);
  const auto queue = build_review_queue(impl_->manifest.records, impl_->options.threshold);
  json items = json::array();
  for (std::size_t i = offset; i < queue.size() && i - offset < limit; ++i) items.push_back(impl_->queue_entry(queue[i]));
  return {200, std::move(items)};
}

ReviewService::Response ReviewService::post_label(const json& body) {
  const char* fields[] = {"record_id", "attribute", "value", "resolver"};
  if (!body.is_object()) return {400, error_body("request body must be an object")};
  for (const char* f : fields)
    if (!body.contains(f) || !body[f].is_string())
      return {400, error_body(std::string("field \"") + f + "\" must be a string")};
  const auto record_id = body["record_id"].get<std::string>();
  const auto attribute = body["attribute"].get<std::string>();
  const auto value = body["value"].get<std::string>();
  const auto resolver = body["resolver"].get<std::string>();
  if (resolver.empty()) return {400, error_body("resolver must be non-empty")};

  std::unique_lock lock(impl_->mutex);
  auto& manifest = impl_->manifest;
  const auto* before_ptr = manifest.find(record_id);
  std::optional<DatasetRecord> before;
  if (before_ptr) before = *before_ptr;
  try {
    const auto outcome = apply_manual_label(manifest, record_id, attribute, value, resolver);
    try {
      append_audit_line(impl_->audit_path, {{"at", outcome.item.resolved_at.value_or(utc_timestamp_now())},
                                             {"record_id", record_id},
                                             {"attribute", attribute},
                                             {"value", value},
                                             {"resolver", resolver},
                                             {"previous_value", before->downstream_labels.at(attribute).value},
                                             {"changed", outcome.changed}});
      if (outcome.changed) impl_->appender.append(*manifest.find(record_id), manifest.header);
    } catch (const Error& e) {
      *manifest.find(record_id) = *before;
      return {500, error_body(std::string("could not persist resolution: ") + e.what())};
    }
    return {200, to_json(outcome.item)};
  } catch (const NotFoundError& e) {
    return {404, error_body(e.what())};
  } catch (const InvalidValueError& e) {
    json j = error_body(e.what());
    j["allowed_values"] = e.allowed();
    return {422, std::move(j)};
  }
}

ReviewService::Response ReviewService::get_stats() const {
  std::shared_lock lock(impl_->mutex);
  const auto& manifest = impl_->manifest;
  std::size_t resolved = 0, records = 0;
  json attributes = json::object();
  for (const auto& r : manifest.records) {
    if (r.rejected) continue;
    ++records;
    for (const auto& [attr, prov] : r.label_provenance) {
      auto& entry = attributes[attr];
      if (entry.is_null()) entry = {{"auto", 0}, {"manual", 0}};
      entry[std::string(to_string(prov))] = entry[std::string(to_string(prov))].get<std::size_t>() + 1;
      if (prov == Provenance::manual) ++resolved;
    }
  }
  const auto pending = build_review_queue(manifest.records, impl_->options.threshold).size();
  return {200,
          {{"total_records", records},
           {"pending", pending},
           {"resolved", resolved},
           {"threshold", impl_->options.threshold},
           {"distribution", to_json(manifest_report(manifest))},
           {"attributes", std::move(attributes)}}};
}

int ReviewService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ReviewService::listen() {
  impl_->server.listen_after_bind();
}

void ReviewService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fairgen
