#include "vitals/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <variant>

#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::ConsistentWealthChangingHealth:
      return "consistent-wealth-changing-health";
    case Pattern::ChangingBoth:
      return "changing-both";
    case Pattern::GrowingWealthConsistentHealth:
      return "growing-wealth-consistent-health";
    case Pattern::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Pattern parse_pattern(std::string_view text) {
  for (auto p : {Pattern::ConsistentWealthChangingHealth, Pattern::ChangingBoth,
                 Pattern::GrowingWealthConsistentHealth, Pattern::Indeterminate}) {
    if (to_string(p) == text) return p;
  }
  throw InputError(fmt::format("unknown pattern label '{}'", text));
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size())) / std::abs(mean);
}

double theil_sen_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("theil_sen_slope: x and y differ in length");
  std::vector<double> slopes;
  slopes.reserve(x.size() * (x.size() - (x.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
  return median(std::move(slopes));
}

Pattern decide(double health_cv, double wealth_cv, double wealth_trend, const PatternThresholds& thresholds) {
  const bool steady_health = health_cv <= thresholds.cv_threshold;
  const bool steady_wealth = wealth_cv <= thresholds.cv_threshold;
  if (steady_wealth && !steady_health) return Pattern::ConsistentWealthChangingHealth;
  if (!steady_wealth && !steady_health) return Pattern::ChangingBoth;
  if (steady_health && !steady_wealth && wealth_trend > thresholds.trend_threshold)
    return Pattern::GrowingWealthConsistentHealth;
  return Pattern::Indeterminate;
}

PatternLabel classify(const HealthWealthSeries& series, const PatternThresholds& thresholds) {
  if (series.size() < kMinClassifiableMonths)
    throw DomainError(fmt::format("insufficient history: {} months, need at least {}", series.size(),
                                  kMinClassifiableMonths));

  std::vector<double> x, health, wealth;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.active_count[i] < 1) continue;
    x.push_back(static_cast<double>(series.months[i] - series.months.front()));
    health.push_back(series.median_wf[i]);
    wealth.push_back(series.gppr[i]);
  }

  PatternLabel out;
  out.health_cv = coefficient_of_variation(health);
  out.wealth_cv = coefficient_of_variation(wealth);
  double wealth_mean = 0.0;
  for (double w : wealth) wealth_mean += w;
  if (!wealth.empty()) wealth_mean /= static_cast<double>(wealth.size());
  out.wealth_trend = wealth_mean == 0.0 ? 0.0 : theil_sen_slope(x, wealth) / wealth_mean;
  out.label = decide(out.health_cv, out.wealth_cv, out.wealth_trend, thresholds);
  return out;
}

Classification classify_all(const EventStore& store, std::span<const std::string> projects, MonthIndex from,
                            MonthIndex to, const MetricsOptions& metrics, const PatternThresholds& thresholds) {
  if (from > to)
    throw InvalidRangeError(fmt::format("month range {}..{} is empty", format_month(from), format_month(to)));

  using Outcome = std::variant<PatternLabel, std::string>;
  std::vector<std::future<Outcome>> pending;
  pending.reserve(projects.size());
  for (const auto& project : projects) {
    pending.push_back(std::async(std::launch::async, [&store, &project, from, to, &metrics, &thresholds]() -> Outcome {
      auto span = store.activity_span(project);
      if (!span) return std::string("no activity");
      auto start = std::max(from, span->first);
      if (start > to || static_cast<std::size_t>(to - start + 1) < kMinClassifiableMonths)
        return fmt::format("insufficient history: {} months in range, need at least {}",
                           start > to ? 0 : to - start + 1, kMinClassifiableMonths);
      try {
        return classify(compute_series(store, project, start, to, metrics), thresholds);
      } catch (const std::exception& e) {
        return std::string(e.what());
      }
    }));
  }

  Classification result;
  for (std::size_t i = 0; i < projects.size(); ++i) {
    auto outcome = pending[i].get();
    if (auto* label = std::get_if<PatternLabel>(&outcome)) {
      result.labels.emplace(projects[i], *label);
    } else {
      result.diagnostics.push_back({projects[i], std::get<std::string>(outcome)});
    }
  }
  return result;
}

}  // namespace vitals
