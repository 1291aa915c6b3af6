#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "support/oracles.hpp"
#include "vitals/errors.hpp"
#include "vitals/patterns.hpp"

using namespace vitals;

namespace {

HealthWealthSeries make_series(std::vector<double> health, std::vector<double> wealth,
                               std::vector<std::int64_t> active = {}) {
  HealthWealthSeries s;
  s.project_id = "o/n";
  for (std::size_t i = 0; i < health.size(); ++i) s.months.push_back(MonthIndex(2011, 1) + static_cast<int>(i));
  if (active.empty()) active.assign(health.size(), 5);
  s.median_wf = std::move(health);
  s.gppr = std::move(wealth);
  s.active_count = std::move(active);
  return s;
}

EventStore load(const std::string& name) {
  std::ifstream in(std::string(VITALS_FIXTURE_DIR "/archetypes/") + name);
  REQUIRE(in);
  auto parsed = parse_event_log(in);
  REQUIRE(parsed.diagnostics.empty());
  return dedupe_and_sort(parsed.events, parsed.prs);
}

}  // namespace

TEST_CASE("coefficient_of_variation uses the population deviation") {
  std::vector<double> alternating{2, 36, 2, 36};
  CHECK(coefficient_of_variation(alternating) == doctest::Approx(17.0 / 19.0));
  CHECK(coefficient_of_variation(std::vector<double>{4, 4, 4}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{0, 0}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{}) == 0.0);
}

TEST_CASE("theil_sen_slope") {
  std::vector<double> x{0, 1, 2, 3, 4, 5};
  CHECK(theil_sen_slope(x, std::vector<double>{1, 3, 5, 7, 9, 11}) == doctest::Approx(2.0));
  // one outlier does not move the estimate
  CHECK(theil_sen_slope(x, std::vector<double>{1, 3, 500, 7, 9, 11}) == doctest::Approx(2.0));
  CHECK(theil_sen_slope(std::vector<double>{0}, std::vector<double>{4}) == 0.0);

  // brute-force check against the pairwise-slope definition
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs, ys;
    for (int i = 0; i < 3 + static_cast<int>(rng() % 15); ++i) {
      xs.push_back(i);
      ys.push_back(static_cast<double>(rng() % 100));
    }
    std::vector<double> slopes;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) slopes.push_back((ys[j] - ys[i]) / (xs[j] - xs[i]));
    REQUIRE(theil_sen_slope(xs, ys) == doctest::Approx(vitals::testing::sorted_median(slopes)));
  }
}

TEST_CASE("classify examples") {
  SUBCASE("constant series is indeterminate") {
    auto label = classify(make_series(std::vector<double>(12, 4.0), std::vector<double>(12, 9.0)));
    CHECK(label.label == Pattern::Indeterminate);
    CHECK(label.health_cv == 0.0);
    CHECK(label.wealth_cv == 0.0);
  }
  SUBCASE("constant wealth, oscillating health") {
    std::vector<double> health;
    for (int i = 0; i < 12; ++i) health.push_back(i % 2 ? 36 : 2);
    auto label = classify(make_series(health, std::vector<double>(12, 10.0)));
    CHECK(label.label == Pattern::ConsistentWealthChangingHealth);
    CHECK(label.health_cv == doctest::Approx(0.894736842).epsilon(1e-9));
    CHECK(label.wealth_cv == 0.0);
  }
  SUBCASE("flat health, wealth rising 10 to 100 over 24 months") {
    std::vector<double> wealth;
    for (int i = 0; i < 24; ++i) wealth.push_back(10.0 + 90.0 * i / 23.0);
    auto label = classify(make_series(std::vector<double>(24, 3.0), wealth));
    CHECK(label.label == Pattern::GrowingWealthConsistentHealth);
    CHECK(label.health_cv == 0.0);
    // evenly spaced values: sd = step * sqrt((n^2 - 1) / 12)
    CHECK(label.wealth_cv == doctest::Approx((90.0 / 23.0) * std::sqrt(575.0 / 12.0) / 55.0));
    CHECK(label.wealth_trend == doctest::Approx((90.0 / 23.0) / 55.0));
  }
  SUBCASE("both changing") {
    std::vector<double> health, wealth;
    for (int i = 0; i < 12; ++i) {
      health.push_back(i % 2 ? 36 : 2);
      wealth.push_back(i % 2 ? 2 : 20);
    }
    CHECK(classify(make_series(health, wealth)).label == Pattern::ChangingBoth);
  }
  SUBCASE("flat health with volatile but trendless wealth") {
    std::vector<double> wealth;
    for (int i = 0; i < 12; ++i) wealth.push_back(i % 2 ? 2 : 20);
    CHECK(classify(make_series(std::vector<double>(12, 3.0), wealth)).label == Pattern::Indeterminate);
  }
}

TEST_CASE("classify needs six months") {
  CHECK_THROWS_WITH_AS(classify(make_series(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0))),
                       doctest::Contains("insufficient history"), DomainError);
  CHECK_NOTHROW(classify(make_series(std::vector<double>(6, 1.0), std::vector<double>(6, 1.0))));
}

TEST_CASE("classify skips months without activity") {
  // leading idle months would otherwise read as volatility
  std::vector<double> health{0, 0, 0, 3, 3, 3, 3, 3, 3};
  std::vector<double> wealth{0, 0, 0, 7, 7, 7, 7, 7, 7};
  auto label = classify(make_series(health, wealth, {0, 0, 0, 4, 4, 4, 4, 4, 4}));
  CHECK(label.health_cv == 0.0);
  CHECK(label.wealth_cv == 0.0);
}

TEST_CASE("classify properties") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 6 + rng() % 24;
    std::vector<double> health(n), wealth(n);
    for (auto& h : health) h = 1.0 + static_cast<double>(rng() % 40);
    for (auto& w : wealth) w = static_cast<double>(rng() % 30);
    auto series = make_series(health, wealth);
    auto base = classify(series);

    // determinism
    REQUIRE(classify(series) == base);

    // scale invariance of the wealth statistics
    auto scaled = series;
    for (auto& w : scaled.gppr) w *= 7.5;
    auto scaled_label = classify(scaled);
    REQUIRE(scaled_label.wealth_cv == doctest::Approx(base.wealth_cv));
    REQUIRE(scaled_label.wealth_trend == doctest::Approx(base.wealth_trend));
    REQUIRE(scaled_label.label == base.label);

    // permuting months keeps the cv values
    auto permuted = series;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      permuted.median_wf[i] = series.median_wf[order[i]];
      permuted.gppr[i] = series.gppr[order[i]];
    }
    auto permuted_label = classify(permuted);
    REQUIRE(permuted_label.health_cv == doctest::Approx(base.health_cv));
    REQUIRE(permuted_label.wealth_cv == doctest::Approx(base.wealth_cv));

    // raising the cv threshold never makes a series less consistent
    auto consistent_count = [](const PatternLabel& l, double theta) {
      return int(l.health_cv <= theta) + int(l.wealth_cv <= theta);
    };
    double previous_theta = 0.0;
    for (double theta : {0.1, 0.2, 0.4, 0.6, 1.0, 2.0}) {
      PatternThresholds t{theta, 0.02};
      auto label = classify(series, t);
      REQUIRE(consistent_count(label, theta) >= consistent_count(label, previous_theta));
      if (label.label == Pattern::ConsistentWealthChangingHealth || label.label == Pattern::GrowingWealthConsistentHealth) {
        PatternThresholds higher{theta * 10, 0.02};
        auto relaxed = classify(series, higher).label;
        REQUIRE((relaxed == label.label || relaxed == Pattern::Indeterminate));
      }
      previous_theta = theta;
    }
  }
}

TEST_CASE("pattern label names round-trip") {
  for (auto p : {Pattern::ConsistentWealthChangingHealth, Pattern::ChangingBoth,
                 Pattern::GrowingWealthConsistentHealth, Pattern::Indeterminate})
    CHECK(parse_pattern(to_string(p)) == p);
  CHECK_THROWS_AS(parse_pattern("thriving"), InputError);
}

TEST_CASE("classify_all") {
  SUBCASE("empty project list") {
    auto r = classify_all(EventStore{}, {}, MonthIndex(2011, 1), MonthIndex(2011, 12));
    CHECK(r.labels.empty());
    CHECK(r.diagnostics.empty());
  }
  SUBCASE("short history becomes a diagnostic") {
    auto store = load("steady_wealth.jsonl");
    // second project starts in October: only three months of history
    std::vector<ContributionEvent> late{
        {"late/project", "x", parse_timestamp("2011-10-05T00:00:00Z"), EventKind::Commit, "1"}};
    auto merged = store.merged_with(dedupe_and_sort(late, {}));
    std::vector<std::string> projects{"archetype/steady-wealth", "late/project"};
    auto r = classify_all(merged, projects, MonthIndex(2011, 1), MonthIndex(2011, 12));
    CHECK(r.labels.size() == 1);
    CHECK(r.labels.count("archetype/steady-wealth") == 1);
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].project_id == "late/project");
    CHECK(r.diagnostics[0].message.find("insufficient history") != std::string::npos);
  }
  SUBCASE("archetype fixtures") {
    struct Case {
      const char* file;
      const char* project;
      Pattern expected;
    };
    for (const auto& c : {Case{"steady_wealth.jsonl", "archetype/steady-wealth", Pattern::ConsistentWealthChangingHealth},
                          Case{"both_changing.jsonl", "archetype/both-changing", Pattern::ChangingBoth},
                          Case{"growing_wealth.jsonl", "archetype/growing-wealth", Pattern::GrowingWealthConsistentHealth}}) {
      CAPTURE(c.file);
      auto store = load(c.file);
      std::vector<std::string> projects{c.project};
      auto r = classify_all(store, projects, MonthIndex(2011, 1), MonthIndex(2011, 12));
      REQUIRE(r.labels.count(c.project) == 1);
      CHECK(r.labels.at(c.project).label == c.expected);
    }
  }
}
