#include "vitals/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

namespace {

// Timelines and completed PRs of one project, built once per query batch.
struct ProjectIndex {
  TimelineMap timelines;
  std::vector<const PullRequestRecord*> completed;

  ProjectIndex(const EventStore& store, std::string_view project_id, const MetricsOptions& options)
      : timelines(build_timelines(store, project_id, options.labor)) {
    for (const auto& pr : store.prs())
      if (pr.project_id == project_id && is_completed(pr, options)) completed.push_back(&pr);
  }

  std::vector<PointDiagramEntry> points(MonthIndex m) const {
    std::vector<PointDiagramEntry> out;
    for (const auto& [id, timeline] : timelines) {
      if (timeline.join_month > m || timeline.labor_in(m) == 0) continue;
      auto labor = timeline.labor_until(m);
      int e = static_cast<int>(labor.size());
      out.push_back({id, e, workforce(labor, e)});
    }
    return out;
  }

  double median_wf(MonthIndex m) const {
    std::vector<double> values;
    for (const auto& p : points(m)) values.push_back(p.workforce);
    return median(std::move(values));
  }

  std::int64_t active(MonthIndex m) const {
    return std::count_if(timelines.begin(), timelines.end(), [&](const auto& kv) {
      return kv.second.join_month <= m && kv.second.labor_in(m) > 0;
    });
  }

  double gppr(MonthIndex m) const {
    double total = 0.0;
    for (const auto* pr : completed)
      if (month_of(*pr->closed_at) == m) total += 1.0 / pr_months(*pr, m);
    return total;
  }
};

}  // namespace

double workforce(std::span<const std::int64_t> labor, int e) {
  if (e < 1) throw DomainError(fmt::format("experience must be >= 1, got {}", e));
  if (labor.size() != static_cast<std::size_t>(e))
    throw DomainError(fmt::format("labor vector has {} entries, expected e = {}", labor.size(), e));
  double wf = 0.0;
  for (int j = 1; j <= e; ++j) {
    auto units = labor[static_cast<std::size_t>(j - 1)];
    if (units < 0) throw DomainError(fmt::format("negative labor {} at month {}", units, j));
    wf += static_cast<double>(units) / static_cast<double>(e - j + 1);
  }
  return wf;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto n = values.size();
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  double upper = *mid;
  double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2.0;
}

int pr_months(const PullRequestRecord& pr, MonthIndex m) {
  if (!pr.closed_at) throw DomainError(fmt::format("PR {} is not completed", pr.pr_id));
  auto closed = month_of(*pr.closed_at);
  if (closed != m)
    throw DomainError(fmt::format("PR {} closed in {}, not {}", pr.pr_id, format_month(closed), format_month(m)));
  return closed - month_of(pr.opened_at) + 1;
}

bool is_completed(const PullRequestRecord& pr, const MetricsOptions& options) {
  return pr.closed_at.has_value() && (!options.merged_only || pr.merged);
}

double median_workforce(const EventStore& store, std::string_view project_id, MonthIndex m,
                        const MetricsOptions& options) {
  return ProjectIndex(store, project_id, options).median_wf(m);
}

double gppr(const EventStore& store, std::string_view project_id, MonthIndex m, const MetricsOptions& options) {
  return ProjectIndex(store, project_id, options).gppr(m);
}

HealthWealthSeries compute_series(const EventStore& store, std::string_view project_id, MonthIndex from,
                                  MonthIndex to, const MetricsOptions& options) {
  if (from > to)
    throw InvalidRangeError(fmt::format("month range {}..{} is empty", format_month(from), format_month(to)));
  ProjectIndex index(store, project_id, options);
  HealthWealthSeries series;
  series.project_id = std::string(project_id);
  const auto n = static_cast<std::size_t>(to - from + 1);
  series.months.reserve(n);
  series.median_wf.reserve(n);
  series.gppr.reserve(n);
  series.active_count.reserve(n);
  for (auto m = from; m <= to; ++m) {
    series.months.push_back(m);
    series.median_wf.push_back(index.median_wf(m));
    series.gppr.push_back(index.gppr(m));
    series.active_count.push_back(index.active(m));
  }
  return series;
}

std::vector<PointDiagramEntry> point_diagram(const EventStore& store, std::string_view project_id, MonthIndex m,
                                             const MetricsOptions& options) {
  return ProjectIndex(store, project_id, options).points(m);
}

}  // namespace vitals
