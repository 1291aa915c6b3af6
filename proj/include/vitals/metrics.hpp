#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/ingest.hpp"
#include "vitals/time.hpp"
#include "vitals/timeline.hpp"

namespace vitals {

struct MetricsOptions {
  LaborMode labor = LaborMode::CommitsAndPrs;
  /// Count only merged PRs as completed; by default any closed PR counts.
  bool merged_only = false;
};

/// Experience-weighted labor of one contributor:
///
///   WF = sum_{j=1..e} Labor[j] / (e - j + 1)
///
/// The current month (j = e) has weight 1 and the join month weight 1/e.
/// `labor` must hold exactly e non-negative entries.
double workforce(std::span<const std::int64_t> labor, int e);

/// Median with the even-count rule "mean of the two middle values"; 0 for an
/// empty set.
double median(std::vector<double> values);

/// Health: median workforce over contributors active in month m.
double median_workforce(const EventStore& store, std::string_view project_id, MonthIndex m,
                        const MetricsOptions& options = {});

/// Inclusive calendar-month span from opening to closing; same month is 1.
/// Throws DomainError when the PR is still open or was closed outside m.
int pr_months(const PullRequestRecord& pr, MonthIndex m);

bool is_completed(const PullRequestRecord& pr, const MetricsOptions& options);

/// Wealth: sum of 1 / pr_months over PRs of the project completed in m.
double gppr(const EventStore& store, std::string_view project_id, MonthIndex m, const MetricsOptions& options = {});

struct HealthWealthSeries {
  std::string project_id;
  std::vector<MonthIndex> months;
  std::vector<double> median_wf;
  std::vector<double> gppr;
  std::vector<std::int64_t> active_count;

  std::size_t size() const { return months.size(); }
  bool operator==(const HealthWealthSeries&) const = default;
};

/// Gap-free monthly series over [from, to]; months without activity are zero.
/// Throws InvalidRangeError when from > to.
HealthWealthSeries compute_series(const EventStore& store, std::string_view project_id, MonthIndex from,
                                  MonthIndex to, const MetricsOptions& options = {});

struct PointDiagramEntry {
  std::string contributor_id;
  int experience = 0;
  double workforce = 0.0;

  bool operator==(const PointDiagramEntry&) const = default;
};

/// One (experience, WF) point per contributor active in m, ordered by
/// contributor id.
std::vector<PointDiagramEntry> point_diagram(const EventStore& store, std::string_view project_id, MonthIndex m,
                                             const MetricsOptions& options = {});

}  // namespace vitals
