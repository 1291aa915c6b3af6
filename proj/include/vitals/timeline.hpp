#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/ingest.hpp"
#include "vitals/time.hpp"

namespace vitals {

/// Which events count as one unit of Labor.
enum class LaborMode { Commits, CommitsAndPrs };

std::string_view to_string(LaborMode mode);
LaborMode parse_labor_mode(std::string_view text);

bool counts_as_labor(const ContributionEvent& e, LaborMode mode);

/// Per-contributor monthly labor, keyed by contributor-relative month j
/// (j = 1 is the join month). Missing keys mean zero labor.
struct ContributorTimeline {
  std::string contributor_id;
  MonthIndex join_month;
  std::map<int, std::int64_t> labor;

  std::int64_t total_labor() const;

  /// Labor[1..e] for e = experience at month m, with zero-filled gaps. Labor
  /// after m is not visible.
  std::vector<std::int64_t> labor_until(MonthIndex m) const;

  /// Labor in calendar month m.
  std::int64_t labor_in(MonthIndex m) const;
};

using TimelineMap = std::map<std::string, ContributorTimeline, std::less<>>;

TimelineMap build_timelines(const EventStore& store, std::string_view project_id,
                            LaborMode mode = LaborMode::CommitsAndPrs);

/// Inclusive month count since joining: the join month itself is 1.
/// Throws DomainError when m precedes the join month.
int experience(const ContributorTimeline& timeline, MonthIndex m);

/// Contributors with at least one labor event in the project during month m.
std::set<std::string> active_contributors(const EventStore& store, std::string_view project_id, MonthIndex m,
                                          LaborMode mode = LaborMode::CommitsAndPrs);

}  // namespace vitals
