#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairgen/groups.hpp"
#include "fairgen/pipeline.hpp"
#include "fairgen/record.hpp"

namespace fairgen {

inline constexpr std::string_view kManifestFormat = "fairgen-manifest/1";

struct ManifestHeader {
  std::size_t latent_dim = 0;
  std::size_t feature_dim = 0;
  GroupSet groups = GroupSet::defaults();
  std::uint64_t root_seed = 0;
  std::string created_at;
  std::string rng_algorithm;
  std::size_t workers = 1;
  nlohmann::json generator = nlohmann::json::object();
  /// Resolved run configuration (empty object when not produced by a run).
  nlohmann::json config = nlohmann::json::object();
  /// Attribute name -> allowed values, filled once downstream heads label the set.
  std::map<std::string, std::vector<std::string>> attributes;

  friend bool operator==(const ManifestHeader&, const ManifestHeader&) = default;
};

/// In-memory view of a manifest file with superseded record versions
/// already resolved (one record per id, in first-appearance order).
struct Manifest {
  ManifestHeader header;
  std::vector<DatasetRecord> records;
  /// Run report appended by `generate` (guided manifests).
  std::optional<DistributionReport> summary;

  DatasetRecord* find(std::string_view record_id);
  const DatasetRecord* find(std::string_view record_id) const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Writes the manifest as JSON lines: header first, one line per record, then
/// the summary line if present. Written to a sibling temp file and renamed.
/// Throws SchemaError when a record's dimensions disagree with the header or
/// ids repeat, IoError on filesystem failure.
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Parses a manifest, resolving each record_id to its highest version.
/// Throws ParseError(line, reason) for malformed lines (including a truncated
/// final line) and SchemaError for structural problems.
Manifest read_manifest(const std::filesystem::path& path);

/// Rewrites the file keeping only the latest version of every record.
void compact_manifest(const std::filesystem::path& path);

/// Single-writer append handle: holds an exclusive advisory lock on the file
/// for its lifetime. Each append is flushed and fsync'ed before returning.
class ManifestAppender {
 public:
  explicit ManifestAppender(const std::filesystem::path& path);
  ~ManifestAppender();
  ManifestAppender(const ManifestAppender&) = delete;
  ManifestAppender& operator=(const ManifestAppender&) = delete;

  /// Appends a superseding version of `record` (caller bumps `version`).
  void append(const DatasetRecord& record, const ManifestHeader& header);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// Append-only JSON-lines audit log, fsync'ed per entry.
void append_audit_line(const std::filesystem::path& path, const nlohmann::json& entry);

}  // namespace fairgen
