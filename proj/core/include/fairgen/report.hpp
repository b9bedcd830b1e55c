#pragma once

#include <string>
#include <string_view>

#include "fairgen/pipeline.hpp"

namespace fairgen {

enum class ReportFormat { text, json };

ReportFormat report_format_from_string(std::string_view text);

/// Text layout is a Class / No. of images / Percentage table, one column per
/// group. Unguided percentages are shares of the total with two decimals;
/// guided reports add an Attempts row and show the acceptance rate with
/// trailing zeros dropped (42.30 -> "42.3%").
std::string render_report(const DistributionReport& report, ReportFormat format);

struct Manifest;

/// The manifest's stored run summary when present; otherwise an unguided
/// tally of its accepted records by group.
DistributionReport manifest_report(const Manifest& manifest);

}  // namespace fairgen
