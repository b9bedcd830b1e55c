#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fairgen/labeling.hpp"

namespace fairgen {

struct ReviewServiceOptions {
  std::filesystem::path manifest;
  double threshold = kDefaultReviewThreshold;
  /// Served at "/" when set and present (the browser console's build output).
  std::optional<std::filesystem::path> static_dir;
  /// Defaults to "<manifest>.audit.jsonl".
  std::optional<std::filesystem::path> audit_log;
};

/// HTTP facade over the review queue of one manifest.
///
///   GET  /api/queue?limit=&offset=   pending items, ascending confidence
///   POST /api/label                  {record_id, attribute, value, resolver}
///   GET  /api/stats                  totals, per-group distribution, provenance counts
///
/// The service is the manifest's single writer for its lifetime. A label is
/// appended to the audit log and to the manifest (fsync'ed) before the 200
/// is sent, so acknowledged resolutions survive a restart.
class ReviewService {
 public:
  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  explicit ReviewService(ReviewServiceOptions options);
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  Response get_queue(std::size_t limit, std::size_t offset) const;
  Response post_label(const nlohmann::json& body);
  Response get_stats() const;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fairgen
