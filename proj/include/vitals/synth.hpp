#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vitals/config.hpp"
#include "vitals/ingest.hpp"
#include "vitals/time.hpp"

namespace vitals {

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool operator==(const IntRange&) const = default;
};

/// Parameters of a synthetic community.
///
/// Core contributors are active every month of the horizon. Casual
/// contributors arrive by a Poisson counting process, contribute for
/// `casual_tenure_months` months (one by default), then leave. PRs arrive by
/// a second Poisson process; each PR's latency in months is drawn from
/// `pr_latency_weights` (entry i is the weight of latency i + 1) and its
/// author from the contributors active in its opening month.
struct CommunitySpec {
  std::string project_id = "synthetic/community";
  MonthIndex start{2011, 1};
  int months = 12;
  int core_count = 0;
  IntRange core_monthly_labor{1, 1};
  double casual_arrival_rate = 0.0;
  IntRange casual_labor{1, 2};
  int casual_tenure_months = 1;
  double pr_rate = 0.0;
  std::vector<double> pr_latency_weights{1.0};
  double merge_probability = 1.0;
  std::uint64_t seed = 0;

  /// Throws DomainError describing the first invalid field.
  void validate() const;

  /// Keys mirror the field names; ranges are two-element arrays, e.g.
  /// `core_monthly_labor = [2, 5]`, and `start` is "YYYY-MM".
  static CommunitySpec from_config(const KeyValueConfig& config);
  static CommunitySpec load(const std::filesystem::path& path);
};

/// Deterministic for a fixed spec and seed, across platforms: draws come
/// straight from a 64-bit Mersenne Twister rather than the standard
/// distributions, whose output is implementation-defined.
EventStore generate(const CommunitySpec& spec);

/// Adds `count` brand-new contributors to the project, each with `labor`
/// commits in month m and nothing else.
EventStore with_casual_influx(const EventStore& store, const std::string& project_id, MonthIndex m, int count,
                              int labor = 1);

}  // namespace vitals
