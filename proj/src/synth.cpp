#include "vitals/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

namespace {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  long long uniform_int(long long lo, long long hi) {
    auto span = static_cast<double>(hi - lo + 1);
    auto k = static_cast<long long>(uniform01() * span);
    return lo + std::min(k, hi - lo);
  }

  // Knuth's product method, in chunks so exp(-rate) never underflows.
  int poisson(double rate) {
    int total = 0;
    while (rate > 0.0) {
      double chunk = std::min(rate, 50.0);
      rate -= chunk;
      const double limit = std::exp(-chunk);
      double product = uniform01();
      while (product > limit) {
        ++total;
        product *= uniform01();
      }
    }
    return total;
  }

  std::size_t categorical(const std::vector<double>& weights) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    // rounding at the top end: last non-zero bucket
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0.0) return i;
    return 0;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

Timestamp random_instant(Draws& draws, MonthIndex m) {
  auto begin = month_start(m);
  auto length = (month_start(m + 1) - begin).count();
  return begin + std::chrono::seconds(draws.uniform_int(0, length - 1));
}

IntRange read_range(const KeyValueConfig& config, const std::string& key, IntRange fallback) {
  const auto* values = config.find(key);
  if (!values) return fallback;
  if (values->size() == 1) {
    int v = static_cast<int>(parse_int(key, values->front()));
    return {v, v};
  }
  if (values->size() != 2) throw InputError(fmt::format("'{}': expected [lo, hi]", key));
  return {static_cast<int>(parse_int(key, (*values)[0])), static_cast<int>(parse_int(key, (*values)[1]))};
}

}  // namespace

void CommunitySpec::validate() const {
  auto fail = [](std::string message) { throw DomainError("invalid community spec: " + message); };
  if (project_id.empty()) fail("project_id is empty");
  if (months < 1) fail("months must be >= 1");
  if (core_count < 0) fail("core_count must be >= 0");
  if (core_monthly_labor.lo < 0 || core_monthly_labor.hi < core_monthly_labor.lo)
    fail("core_monthly_labor must satisfy 0 <= lo <= hi");
  if (casual_labor.lo < 0 || casual_labor.hi < casual_labor.lo) fail("casual_labor must satisfy 0 <= lo <= hi");
  if (casual_tenure_months < 1) fail("casual_tenure_months must be >= 1");
  if (!(casual_arrival_rate >= 0.0) || !std::isfinite(casual_arrival_rate))
    fail("casual_arrival_rate must be finite and >= 0");
  if (!(pr_rate >= 0.0) || !std::isfinite(pr_rate)) fail("pr_rate must be finite and >= 0");
  if (pr_latency_weights.empty()) fail("pr_latency_weights is empty");
  double total = 0.0;
  for (double w : pr_latency_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("pr_latency_weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) fail("pr_latency_weights sum to zero");
  if (!(merge_probability >= 0.0 && merge_probability <= 1.0)) fail("merge_probability must lie in [0, 1]");
}

CommunitySpec CommunitySpec::from_config(const KeyValueConfig& config) {
  CommunitySpec spec;
  if (auto v = config.get("project_id")) spec.project_id = *v;
  if (auto v = config.get("start")) spec.start = parse_month(*v);
  if (auto v = config.get_int("months")) spec.months = static_cast<int>(*v);
  if (auto v = config.get_int("core_count")) spec.core_count = static_cast<int>(*v);
  spec.core_monthly_labor = read_range(config, "core_monthly_labor", spec.core_monthly_labor);
  if (auto v = config.get_double("casual_arrival_rate")) spec.casual_arrival_rate = *v;
  spec.casual_labor = read_range(config, "casual_labor", spec.casual_labor);
  if (auto v = config.get_int("casual_tenure_months")) spec.casual_tenure_months = static_cast<int>(*v);
  if (auto v = config.get_double("pr_rate")) spec.pr_rate = *v;
  if (const auto* weights = config.find("pr_latency_weights")) {
    spec.pr_latency_weights.clear();
    for (const auto& w : *weights) spec.pr_latency_weights.push_back(parse_double("pr_latency_weights", w));
  }
  if (auto v = config.get_double("merge_probability")) spec.merge_probability = *v;
  if (auto v = config.get("seed")) {
    auto parsed = parse_int("seed", *v);
    if (parsed < 0) throw InputError("'seed' must be non-negative");
    spec.seed = static_cast<std::uint64_t>(parsed);
  }
  spec.validate();
  return spec;
}

CommunitySpec CommunitySpec::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

EventStore generate(const CommunitySpec& spec) {
  spec.validate();
  Draws draws(spec.seed);

  std::vector<ContributionEvent> events;
  std::vector<PullRequestRecord> prs;
  const auto last = spec.start + (spec.months - 1);
  int commit_seq = 0;
  int casual_seq = 0;
  int pr_seq = 0;
  int drive_by_seq = 0;

  auto commit = [&](const std::string& who, MonthIndex m) {
    events.push_back({spec.project_id, who, random_instant(draws, m), EventKind::Commit,
                      fmt::format("c{:07d}", ++commit_seq)});
  };

  std::vector<std::string> core;
  for (int i = 1; i <= spec.core_count; ++i) core.push_back(fmt::format("core-{:03d}", i));

  struct Casual {
    std::string id;
    MonthIndex leaves;  // last active month
  };
  std::vector<Casual> casuals;

  for (auto m = spec.start; m <= last; ++m) {
    std::vector<std::string> active;

    for (const auto& who : core) {
      auto units = draws.uniform_int(spec.core_monthly_labor.lo, spec.core_monthly_labor.hi);
      for (long long u = 0; u < units; ++u) commit(who, m);
      if (units > 0) active.push_back(who);
    }

    for (int n = draws.poisson(spec.casual_arrival_rate); n > 0; --n)
      casuals.push_back({fmt::format("casual-{:05d}", ++casual_seq), m + (spec.casual_tenure_months - 1)});
    for (const auto& c : casuals) {
      if (c.leaves < m) continue;
      auto units = draws.uniform_int(spec.casual_labor.lo, spec.casual_labor.hi);
      for (long long u = 0; u < units; ++u) commit(c.id, m);
      if (units > 0) active.push_back(c.id);
    }
    std::erase_if(casuals, [&](const Casual& c) { return c.leaves <= m; });

    for (int n = draws.poisson(spec.pr_rate); n > 0; --n) {
      PullRequestRecord pr;
      pr.project_id = spec.project_id;
      pr.pr_id = std::to_string(++pr_seq);
      pr.author_id = active.empty()
                         ? fmt::format("drive-by-{:04d}", ++drive_by_seq)
                         : active[static_cast<std::size_t>(draws.uniform_int(0, static_cast<long long>(active.size()) - 1))];
      pr.opened_at = random_instant(draws, m);
      const int latency = static_cast<int>(draws.categorical(spec.pr_latency_weights)) + 1;
      const auto close_month = m + (latency - 1);
      const bool merged = draws.bernoulli(spec.merge_probability);
      if (close_month <= last) {
        if (latency == 1) {
          auto remaining = (month_start(m + 1) - pr.opened_at).count() - 1;
          pr.closed_at = pr.opened_at + std::chrono::seconds(draws.uniform_int(0, remaining));
        } else {
          pr.closed_at = random_instant(draws, close_month);
        }
        pr.merged = merged;
      }
      events.push_back({spec.project_id, pr.author_id, pr.opened_at, EventKind::PullRequestSubmitted, pr.pr_id});
      prs.push_back(std::move(pr));
    }
  }

  return dedupe_and_sort(std::move(events), std::move(prs), {},
                         {fmt::format("synth:{}:seed={}", spec.project_id, spec.seed)});
}

EventStore with_casual_influx(const EventStore& store, const std::string& project_id, MonthIndex m, int count,
                              int labor) {
  if (count < 0 || labor < 1) throw DomainError("casual influx needs count >= 0 and labor >= 1");
  std::vector<ContributionEvent> extra;
  const auto when = month_start(m) + std::chrono::hours(12);
  for (int i = 0; i < count; ++i) {
    auto who = fmt::format("influx-{}-{:05d}", format_month(m), i);
    for (int u = 0; u < labor; ++u)
      extra.push_back({project_id, who, when, EventKind::Commit, fmt::format("{}-{}", who, u)});
  }
  return store.merged_with(dedupe_and_sort(std::move(extra), {}));
}

}  // namespace vitals
