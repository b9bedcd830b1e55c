#include "fairgen/manifest.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fairgen/errors.hpp"
#include "fairgen/serialization.hpp"

namespace fairgen {

namespace {

void check_record_shape(const DatasetRecord& r, const ManifestHeader& h, std::size_t line) {
  if (r.latent.size() != h.latent_dim)
    throw SchemaError(line, "record " + r.record_id + " latent has " + std::to_string(r.latent.size()) +
                                " components, header says " + std::to_string(h.latent_dim));
  if (r.feature.size() != h.feature_dim)
    throw SchemaError(line, "record " + r.record_id + " feature has " + std::to_string(r.feature.size()) +
                                " components, header says " + std::to_string(h.feature_dim));
  if (r.group.index >= h.groups.size()) throw SchemaError(line, "record " + r.record_id + " group out of range");
}

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write failed on " + path.string() + ": " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

void sync_append(const std::filesystem::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, line, path);
    if (::fsync(fd) != 0) throw IoError("fsync failed on " + path.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

}  // namespace

DatasetRecord* Manifest::find(std::string_view record_id) {
  for (auto& r : records)
    if (r.record_id == record_id) return &r;
  return nullptr;
}

const DatasetRecord* Manifest::find(std::string_view record_id) const {
  return const_cast<Manifest*>(this)->find(record_id);
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::string out = to_json(manifest.header).dump() + '\n';
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    check_record_shape(r, manifest.header, i + 2);
    if (!ids.insert(r.record_id).second) throw SchemaError(i + 2, "duplicate record_id " + r.record_id);
    out += to_json(r).dump();
    out += '\n';
  }
  if (manifest.summary) out += nlohmann::json{{"kind", "summary"}, {"report", to_json(*manifest.summary)}}.dump() + '\n';

  // Rewriting a manifest someone is appending to would orphan their writes.
  std::optional<ManifestAppender> guard;
  if (std::filesystem::exists(path)) guard.emplace(path);

  auto tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, out, tmp);
    if (::fsync(fd) != 0) throw IoError("fsync failed on " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  Manifest manifest;
  bool have_header = false;
  std::unordered_map<std::string, std::size_t> position;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, terminated ? std::string("invalid JSON: ") + e.what()
                                           : std::string("truncated final line: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
      throw ParseError(line_no, "line is not an object with a \"kind\" field");
    const auto kind = j["kind"].get<std::string>();

    if (kind == "header") {
      if (have_header) throw SchemaError(line_no, "second header line");
      try {
        manifest.header = manifest_header_from_json(j);
      } catch (const ConfigError& e) {
        throw ParseError(line_no, e.what());
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw SchemaError(line_no, kind + " line before the header");

    if (kind == "record") {
      std::optional<DatasetRecord> record;
      try {
        record.emplace(dataset_record_from_json(j, manifest.header.groups));
      } catch (const NotFoundError& e) {
        throw SchemaError(line_no, e.what());
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
      check_record_shape(*record, manifest.header, line_no);
      const auto it = position.find(record->record_id);
      if (it == position.end()) {
        position.emplace(record->record_id, manifest.records.size());
        manifest.records.push_back(std::move(*record));
      } else {
        auto& existing = manifest.records[it->second];
        if (record->version == existing.version)
          throw SchemaError(line_no, "duplicate record_id " + record->record_id + " at version " +
                                         std::to_string(record->version));
        if (record->version > existing.version) existing = std::move(*record);
      }
    } else if (kind == "summary") {
      if (!j.contains("report")) throw ParseError(line_no, "summary line without report");
      try {
        manifest.summary = distribution_report_from_json(j["report"]);
      } catch (const ConfigError& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "unknown line kind \"" + kind + "\"");
    }
  }
  if (!have_header) throw SchemaError(1, "manifest has no header");
  return manifest;
}

void compact_manifest(const std::filesystem::path& path) {
  write_manifest(path, read_manifest(path));
}

ManifestAppender::ManifestAppender(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd_ < 0) throw IoError("cannot open manifest " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw IoError("manifest " + path.string() + " is locked by another writer");
  }
}

ManifestAppender::~ManifestAppender() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void ManifestAppender::append(const DatasetRecord& record, const ManifestHeader& header) {
  check_record_shape(record, header, 0);
  write_all(fd_, to_json(record).dump() + '\n', path_);
  if (::fsync(fd_) != 0) throw IoError("fsync failed on " + path_.string());
}

void append_audit_line(const std::filesystem::path& path, const nlohmann::json& entry) {
  sync_append(path, entry.dump() + '\n');
}

}  // namespace fairgen
