#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/metrics.hpp"
#include "vitals/patterns.hpp"
#include "vitals/time.hpp"

namespace vitals {

struct ProjectReport {
  std::string project_id;
  HealthWealthSeries series;
  std::optional<PatternLabel> pattern;

  bool operator==(const ProjectReport&) const = default;
};

struct ReportBundle {
  std::vector<MonthIndex> months;
  std::vector<ProjectReport> projects;
  std::string tool_version;
  std::map<std::string, std::string> config_snapshot;

  /// Throws DomainError unless every series covers exactly `months`.
  void validate() const;
};

/// Builds a bundle over [from, to] for each project, classifying those with
/// enough history.
ReportBundle make_bundle(const EventStore& store, const std::vector<std::string>& projects, MonthIndex from,
                         MonthIndex to, const MetricsOptions& metrics = {}, const PatternThresholds& thresholds = {});

/// Shortest round-trip-safe rendering capped at 9 significant digits.
std::string format_real(double value);

/// `project,year,month,median_wf,gppr,active_contributors`, one row per
/// project-month sorted by (project, year, month).
std::string export_csv(const ReportBundle& bundle);

/// {"months": [...], "projects": [{"id", "median_wf", "gppr", "active", "pattern"}]}
std::string export_json(const ReportBundle& bundle);

/// Inverse of export_json (metadata is not part of the document).
ReportBundle parse_json_bundle(std::string_view text);

/// Element ids the chart script relies on.
inline constexpr std::string_view kDataElementId = "vitals-data";
inline constexpr std::string_view kChartElementId = "vitals-chart";

/// Single self-contained HTML document: the export_json document as an
/// inline data block and `chart_asset` inlined as the only script. Throws
/// ChartAssetMissing when the asset text is empty.
std::string render_html(const ReportBundle& bundle, std::string_view chart_asset, std::string_view title = "vitals");

/// Extracts the inline data block from a rendered report.
std::optional<std::string> extract_data_block(std::string_view html);

}  // namespace vitals
