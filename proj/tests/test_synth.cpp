#include <doctest.h>

#include <cmath>

#include "vitals/errors.hpp"
#include "vitals/metrics.hpp"
#include "vitals/synth.hpp"
#include "vitals/timeline.hpp"

using namespace vitals;

TEST_CASE("generate: all rates zero gives an empty store") {
  CommunitySpec spec;
  spec.months = 6;
  auto store = generate(spec);
  CHECK(store.events().empty());
  CHECK(store.prs().empty());
}

TEST_CASE("generate: fixed core, nothing else") {
  CommunitySpec spec;
  spec.months = 6;
  spec.core_count = 2;
  spec.core_monthly_labor = {3, 3};
  auto timelines = build_timelines(generate(spec), spec.project_id);
  REQUIRE(timelines.size() == 2);
  const std::map<int, std::int64_t> expected{{1, 3}, {2, 3}, {3, 3}, {4, 3}, {5, 3}, {6, 3}};
  for (const auto& [who, t] : timelines) {
    CHECK(t.join_month == spec.start);
    CHECK(t.labor == expected);
  }
}

TEST_CASE("generate: determinism under a fixed seed") {
  CommunitySpec spec;
  spec.months = 12;
  spec.core_count = 3;
  spec.core_monthly_labor = {1, 5};
  spec.casual_arrival_rate = 2.5;
  spec.pr_rate = 4.0;
  spec.pr_latency_weights = {0.5, 0.3, 0.2};
  spec.merge_probability = 0.8;
  spec.seed = 77;
  auto a = generate(spec);
  CHECK(a == generate(spec));
  CHECK(serialize_event_log(a) == serialize_event_log(generate(spec)));
  spec.seed = 78;
  CHECK_FALSE(a == generate(spec));
}

TEST_CASE("generate: PR latencies follow the configured support") {
  CommunitySpec spec;
  spec.months = 24;
  spec.core_count = 2;
  spec.pr_rate = 6.0;
  spec.pr_latency_weights = {0.0, 1.0};  // always two months
  spec.seed = 5;
  auto store = generate(spec);
  REQUIRE_FALSE(store.prs().empty());
  for (const auto& pr : store.prs()) {
    if (!pr.closed_at) {
      CHECK(month_of(pr.opened_at) == spec.start + (spec.months - 1));
      continue;
    }
    CHECK(pr_months(pr, month_of(*pr.closed_at)) == 2);
  }
}

TEST_CASE("generate: casual contributors stay for their tenure") {
  CommunitySpec spec;
  spec.months = 10;
  spec.casual_arrival_rate = 3.0;
  spec.casual_tenure_months = 2;
  spec.seed = 12;
  auto timelines = build_timelines(generate(spec), spec.project_id);
  REQUIRE_FALSE(timelines.empty());
  for (const auto& [who, t] : timelines) {
    CHECK(who.rfind("casual-", 0) == 0);
    CHECK(t.labor.rbegin()->first <= 2);
  }
}

TEST_CASE("generate: mean active count matches the spec rates") {
  // Each month: core_count cores plus Poisson(rate) single-month casuals.
  CommunitySpec spec;
  spec.months = 12;
  spec.core_count = 3;
  spec.core_monthly_labor = {1, 4};
  spec.casual_arrival_rate = 4.0;
  const int seeds = 100;
  double sum = 0.0, sum_sq = 0.0;
  int samples = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    spec.seed = static_cast<std::uint64_t>(seed);
    auto series = compute_series(generate(spec), spec.project_id, spec.start, spec.start + (spec.months - 1));
    for (auto count : series.active_count) {
      sum += static_cast<double>(count);
      sum_sq += static_cast<double>(count * count);
      ++samples;
    }
  }
  const double mean = sum / samples;
  const double expected = spec.core_count + spec.casual_arrival_rate;
  const double standard_error = std::sqrt(spec.casual_arrival_rate / samples);
  CHECK(std::abs(mean - expected) <= 3 * standard_error);
}

TEST_CASE("generate: more casual arrivals do not raise the long-run median") {
  auto mean_median = [](double rate) {
    double total = 0.0;
    for (int seed = 1; seed <= 30; ++seed) {
      CommunitySpec spec;
      spec.months = 18;
      spec.core_count = 4;
      spec.core_monthly_labor = {2, 6};
      spec.casual_arrival_rate = rate;
      spec.seed = static_cast<std::uint64_t>(seed);
      auto store = generate(spec);
      // long run: average over the last six months
      for (int k = 12; k < 18; ++k) total += median_workforce(store, spec.project_id, spec.start + k);
    }
    return total / (30 * 6);
  };
  double low = mean_median(0.5);
  double mid = mean_median(4.0);
  double high = mean_median(16.0);
  CHECK(mid <= low);
  CHECK(high <= mid);
}

TEST_CASE("spec validation") {
  CommunitySpec spec;
  spec.months = 0;
  CHECK_THROWS_AS(generate(spec), DomainError);
  spec = {};
  spec.core_monthly_labor = {3, 1};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = {};
  spec.pr_latency_weights = {0.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = {};
  spec.casual_arrival_rate = -1;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = {};
  spec.merge_probability = 1.5;
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("spec from the config file format") {
  auto spec = CommunitySpec::load(VITALS_FIXTURE_DIR "/synth/community.conf");
  CHECK(spec.project_id == "synthetic/community");
  CHECK(spec.start == MonthIndex(2011, 1));
  CHECK(spec.months == 24);
  CHECK(spec.core_count == 4);
  CHECK(spec.core_monthly_labor == IntRange{2, 6});
  CHECK(spec.casual_arrival_rate == 3.0);
  CHECK(spec.casual_labor == IntRange{1, 2});
  CHECK(spec.pr_latency_weights == std::vector<double>{0.6, 0.3, 0.1});
  CHECK(spec.merge_probability == 0.9);
  CHECK(spec.seed == 20111001u);

  CHECK_THROWS_AS(CommunitySpec::from_config(KeyValueConfig::parse("months = -2\n")), DomainError);
  CHECK_THROWS_AS(CommunitySpec::from_config(KeyValueConfig::parse("months = many\n")), InputError);
}

TEST_CASE("with_casual_influx adds fresh single-month contributors") {
  CommunitySpec spec;
  spec.months = 6;
  spec.core_count = 2;
  spec.core_monthly_labor = {4, 4};
  auto base = generate(spec);
  auto m = spec.start + 3;
  auto grown = with_casual_influx(base, spec.project_id, m, 5);
  CHECK(active_contributors(grown, spec.project_id, m).size() == 7);
  CHECK(active_contributors(grown, spec.project_id, m + 1).size() == 2);
  CHECK(median_workforce(grown, spec.project_id, m) == 1.0);
}
