#include "fairgen/report.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "fairgen/errors.hpp"
#include "fairgen/manifest.hpp"
#include "fairgen/serialization.hpp"

namespace fairgen {

ReportFormat report_format_from_string(std::string_view text) {
  if (text == "text") return ReportFormat::text;
  if (text == "json") return ReportFormat::json;
  throw ConfigError("unknown report format: " + std::string(text));
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string trimmed2(double v) {
  std::string s = fixed2(v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string render_report(const DistributionReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(report).dump(2) + '\n';

  const bool guided = report.mode == ReportMode::guided;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Class"});
  rows.push_back({"No. of images"});
  if (guided) rows.push_back({"Attempts"});
  rows.push_back({"Percentage"});

  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    const auto& g = report.groups[i];
    rows[0].push_back(g.group.name);
    rows[1].push_back(std::to_string(g.count));
    if (guided) {
      const std::size_t attempts = g.attempts.value_or(0);
      rows[2].push_back(g.attempts ? std::to_string(attempts) : "-");
      const double rate = attempts == 0 ? 0.0 : 100.0 * static_cast<double>(g.count) / static_cast<double>(attempts);
      rows[3].push_back(trimmed2(rate) + "%");
    } else {
      rows[2].push_back(fixed2(report.percentage(i)) + "%");
    }
  }

  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::string out;
  for (const auto& row : rows) {
    std::string line = row[0] + std::string(width[0] - row[0].size(), ' ');
    for (std::size_t c = 1; c < row.size(); ++c) line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
    out += line + '\n';
  }
  return out;
}

}  // namespace fairgen

namespace fairgen {

DistributionReport manifest_report(const Manifest& manifest) {
  if (manifest.summary) return *manifest.summary;
  const auto& groups = manifest.header.groups;
  std::vector<std::size_t> counts(groups.size(), 0);
  for (const auto& r : manifest.records)
    if (!r.rejected) ++counts.at(r.group.index);
  std::vector<GroupLabel> labels;
  for (std::size_t k = 0; k < groups.size(); ++k) labels.push_back(groups.at(k));
  return DistributionReport::from_counts(ReportMode::unguided, manifest.header.root_seed, labels, counts);
}

}  // namespace fairgen
