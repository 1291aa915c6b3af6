#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/ingest.hpp"
#include "vitals/metrics.hpp"

namespace vitals {

/// Health/Wealth evolution shapes. The criterion separating them is a
/// heuristic: coefficient of variation against a threshold for "consistent",
/// plus a normalized Theil-Sen slope for "growing".
enum class Pattern {
  ConsistentWealthChangingHealth,
  ChangingBoth,
  GrowingWealthConsistentHealth,
  Indeterminate,
};

std::string_view to_string(Pattern pattern);
Pattern parse_pattern(std::string_view text);

struct PatternLabel {
  Pattern label = Pattern::Indeterminate;
  double health_cv = 0.0;
  double wealth_cv = 0.0;
  double wealth_trend = 0.0;  // Theil-Sen slope / mean, per month

  bool operator==(const PatternLabel&) const = default;
};

struct PatternThresholds {
  double cv_threshold = 0.4;      // consistent(x) <=> cv(x) <= this
  double trend_threshold = 0.02;  // growing <=> normalized slope > this
};

inline constexpr std::size_t kMinClassifiableMonths = 6;

/// Population standard deviation over mean; 0 when the mean is 0.
double coefficient_of_variation(std::span<const double> values);

/// Median of pairwise slopes (y_j - y_i) / (x_j - x_i) over i < j with
/// distinct x. 0 for fewer than two points.
double theil_sen_slope(std::span<const double> x, std::span<const double> y);

/// Label from precomputed statistics.
Pattern decide(double health_cv, double wealth_cv, double wealth_trend, const PatternThresholds& thresholds);

/// Statistics are taken over months with at least one active contributor.
/// Throws DomainError("insufficient history") for fewer than 6 months.
PatternLabel classify(const HealthWealthSeries& series, const PatternThresholds& thresholds = {});

struct ProjectDiagnostic {
  std::string project_id;
  std::string message;
};

struct Classification {
  std::map<std::string, PatternLabel> labels;
  std::vector<ProjectDiagnostic> diagnostics;
};

/// Classifies each project over [from, to], trimmed to start at the
/// project's first activity. Per-project failures become diagnostics.
Classification classify_all(const EventStore& store, std::span<const std::string> projects, MonthIndex from,
                            MonthIndex to, const MetricsOptions& metrics = {},
                            const PatternThresholds& thresholds = {});

}  // namespace vitals
