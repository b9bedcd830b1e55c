#include <cmath>
#include <thread>

#include <httplib.h>

#include "fairgen/errors.hpp"
#include "fairgen/generator.hpp"

namespace fairgen {

HttpGenerator::HttpGenerator(HttpGeneratorOptions options) : options_(std::move(options)) {
  constexpr std::string_view scheme = "http://";
  if (!options_.endpoint.starts_with(scheme))
    throw ConfigError("generator endpoint must be an http:// URI: " + options_.endpoint);
  if (options_.attempts < 1) throw ConfigError("generator attempts must be >= 1");
  if (options_.latent_dim == 0) throw ConfigError("generator latent_dim must be >= 1");
  const auto slash = options_.endpoint.find('/', scheme.size());
  scheme_host_port_ = options_.endpoint.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : options_.endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/generate";
}

nlohmann::json HttpGenerator::encode_request(std::span<const LatentVector> batch) {
  auto latents = nlohmann::json::array();
  for (const auto& z : batch) latents.push_back(z.to_vector());
  return {{"latents", std::move(latents)}};
}

std::vector<GeneratedSample> HttpGenerator::decode_response(const nlohmann::json& body, std::size_t expected,
                                                            std::size_t feature_dim) {
  if (!body.is_object() || !body.contains("features") || !body["features"].is_array())
    throw ProtocolError("response lacks a \"features\" array");
  const auto& features = body["features"];
  if (features.size() != expected) {
    const std::size_t offending = std::min<std::size_t>(features.size(), expected);
    throw ProtocolError("response has " + std::to_string(features.size()) + " features for a batch of " +
                            std::to_string(expected),
                        offending);
  }
  const nlohmann::json* images = nullptr;
  if (body.contains("images") && !body["images"].is_null()) {
    images = &body["images"];
    if (!images->is_array()) throw ProtocolError("\"images\" must be an array");
    if (images->size() != expected)
      throw ProtocolError("response has " + std::to_string(images->size()) + " images for a batch of " +
                              std::to_string(expected),
                          std::min<std::size_t>(images->size(), expected));
  }

  std::size_t width = feature_dim;
  std::vector<GeneratedSample> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const auto& row = features[i];
    if (!row.is_array() || row.empty()) throw ProtocolError("feature entry is not a non-empty array", i);
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ProtocolError("feature length " + std::to_string(row.size()) + " != " + std::to_string(width), i);
    std::vector<double> values;
    values.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) throw ProtocolError("non-numeric feature value", i);
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ProtocolError("non-finite feature value", i);
      values.push_back(x);
    }
    std::optional<std::string> image;
    if (images) {
      const auto& ref = (*images)[i];
      if (ref.is_string()) {
        image = ref.get<std::string>();
      } else if (!ref.is_null()) {
        throw ProtocolError("image reference must be a string or null", i);
      }
    }
    out.push_back(GeneratedSample{FeatureVector(std::move(values)), std::move(image)});
  }
  return out;
}

std::vector<GeneratedSample> HttpGenerator::generate(std::span<const LatentVector> batch) const {
  if (batch.empty()) throw InvalidDimensionError("external generator batch must be non-empty");
  for (std::size_t i = 0; i < batch.size(); ++i)
    if (batch[i].size() != options_.latent_dim)
      throw DimensionMismatchError(options_.latent_dim, batch[i].size(),
                                   "external generator batch item " + std::to_string(i));

  const std::string payload = encode_request(batch).dump();
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);

  std::string last_failure;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(seconds.count(), usec.count());
    client.set_read_timeout(seconds.count(), usec.count());
    client.set_write_timeout(seconds.count(), usec.count());
    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_failure = "transport failure contacting " + options_.endpoint + ": " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_failure = "external generator returned HTTP " + std::to_string(res->status);
    } else {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
      }
      return decode_response(body, batch.size(), options_.feature_dim);
    }
    if (attempt < options_.attempts) std::this_thread::sleep_for(options_.backoff);
  }
  throw TransportError(last_failure, options_.attempts);
}

nlohmann::json HttpGenerator::descriptor() const {
  return {{"kind", "http"},
          {"endpoint", options_.endpoint},
          {"latent_dim", options_.latent_dim},
          {"feature_dim", options_.feature_dim}};
}

}  // namespace fairgen
