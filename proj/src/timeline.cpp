#include "vitals/timeline.hpp"

#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

std::string_view to_string(LaborMode mode) {
  return mode == LaborMode::Commits ? "commits" : "commits+prs";
}

LaborMode parse_labor_mode(std::string_view text) {
  if (text == "commits") return LaborMode::Commits;
  if (text == "commits+prs") return LaborMode::CommitsAndPrs;
  throw InputError(fmt::format("unknown labor mode '{}', expected commits|commits+prs", text));
}

bool counts_as_labor(const ContributionEvent& e, LaborMode mode) {
  return e.kind == EventKind::Commit || mode == LaborMode::CommitsAndPrs;
}

std::int64_t ContributorTimeline::total_labor() const {
  std::int64_t total = 0;
  for (const auto& [j, count] : labor) total += count;
  return total;
}

std::vector<std::int64_t> ContributorTimeline::labor_until(MonthIndex m) const {
  const int e = experience(*this, m);
  std::vector<std::int64_t> out(static_cast<std::size_t>(e), 0);
  for (auto it = labor.begin(); it != labor.end() && it->first <= e; ++it)
    out[static_cast<std::size_t>(it->first - 1)] = it->second;
  return out;
}

std::int64_t ContributorTimeline::labor_in(MonthIndex m) const {
  auto it = labor.find(m - join_month + 1);
  return it == labor.end() ? 0 : it->second;
}

int experience(const ContributorTimeline& timeline, MonthIndex m) {
  if (m < timeline.join_month)
    throw DomainError(fmt::format("contributor not yet joined: {} joined {}, asked for {}", timeline.contributor_id,
                                  format_month(timeline.join_month), format_month(m)));
  return m - timeline.join_month + 1;
}

TimelineMap build_timelines(const EventStore& store, std::string_view project_id, LaborMode mode) {
  // Events are time-ordered, so the first event seen per contributor fixes
  // the join month.
  TimelineMap timelines;
  for (const auto& e : store.events()) {
    if (e.project_id != project_id || !counts_as_labor(e, mode)) continue;
    auto month = month_of(e.timestamp);
    auto it = timelines.find(e.contributor_id);
    if (it == timelines.end()) {
      it = timelines.emplace(e.contributor_id, ContributorTimeline{e.contributor_id, month, {}}).first;
    }
    ++it->second.labor[month - it->second.join_month + 1];
  }
  return timelines;
}

std::set<std::string> active_contributors(const EventStore& store, std::string_view project_id, MonthIndex m,
                                          LaborMode mode) {
  std::set<std::string> active;
  for (const auto& e : store.events()) {
    if (e.project_id == project_id && counts_as_labor(e, mode) && month_of(e.timestamp) == m)
      active.insert(e.contributor_id);
  }
  return active;
}

}  // namespace vitals
