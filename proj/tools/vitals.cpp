// vitals: Health (median workforce) and Wealth (GPPR) series from OSS
// contribution data.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "vitals/config.hpp"
#include "vitals/errors.hpp"
#include "vitals/forge.hpp"
#include "vitals/ingest.hpp"
#include "vitals/metrics.hpp"
#include "vitals/patterns.hpp"
#include "vitals/report.hpp"
#include "vitals/synth.hpp"

#ifndef VITALS_VERSION
#define VITALS_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace vitals;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInput = 3, kNetwork = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(ExitCode code, std::string_view category, std::string_view message) {
  std::fflush(stdout);
  std::cerr << fmt::format("error[{}]: {}\n", category, message);
  std::exit(code);
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  fs::path target(path);
  fs::path tmp = target;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InputError(fmt::format("failed writing '{}'", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError(fmt::format("cannot replace '{}': {}", path, ec.message()));
  }
  spdlog::info("wrote {}", path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool looks_like_event_log(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  return first == std::string::npos || text[first] == '{';
}

void report_diagnostics(const std::string& source, const ParseResult& r) {
  for (const auto& d : r.diagnostics) spdlog::warn("{}:{}: {}", source, d.line, d.message);
  if (!r.diagnostics.empty()) spdlog::warn("{}: {} malformed line(s) skipped", source, r.diagnostics.size());
}

EventStore load_stores(const std::vector<std::string>& paths, bool strict) {
  EventStore store;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read '{}'", path));
    ParseResult r;
    try {
      r = parse_event_log(in, ParseOptions{strict});
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}: {}", path, e.what()));
    }
    report_diagnostics(path, r);
    store = store.merged_with(dedupe_and_sort(std::move(r.events), std::move(r.prs), {}, {path}));
  }
  return store;
}

// Flags shared by the commands that compute series.
struct ComputeFlags {
  std::vector<std::string> stores;
  std::vector<std::string> projects;
  std::string from, to;
  std::string labor = "commits+prs";
  bool merged_only = false;
  double cv_threshold = 0.4;
  double trend_threshold = 0.02;
  std::string format = "csv";
  std::string out;
  bool strict = false;

  MetricsOptions metrics() const {
    MetricsOptions m;
    m.labor = parse_labor_mode(labor);
    m.merged_only = merged_only;
    return m;
  }
  PatternThresholds thresholds() const { return {cv_threshold, trend_threshold}; }
};

struct Scope {
  EventStore store;
  std::vector<std::string> projects;
  MonthIndex from, to;
};

MonthIndex month_flag(const std::string& name, const std::string& value) {
  try {
    return parse_month(value);
  } catch (const InputError& e) {
    throw UsageError(fmt::format("--{}: {}", name, e.what()));
  }
}

Scope resolve_scope(const ComputeFlags& flags) {
  Scope scope;
  // validate the range before touching any input
  std::optional<MonthIndex> from, to;
  if (!flags.from.empty()) from = month_flag("from", flags.from);
  if (!flags.to.empty()) to = month_flag("to", flags.to);
  if (from && to && *from > *to)
    throw InvalidRangeError(fmt::format("--from {} is after --to {}", flags.from, flags.to));

  scope.store = load_stores(flags.stores, flags.strict);
  scope.projects = flags.projects.empty() ? scope.store.projects() : flags.projects;
  std::sort(scope.projects.begin(), scope.projects.end());
  scope.projects.erase(std::unique(scope.projects.begin(), scope.projects.end()), scope.projects.end());

  if (!from || !to) {
    std::optional<std::pair<MonthIndex, MonthIndex>> span;
    for (const auto& p : scope.projects) {
      auto s = scope.store.activity_span(p);
      if (!s) continue;
      if (!span) {
        span = s;
      } else {
        span->first = std::min(span->first, s->first);
        span->second = std::max(span->second, s->second);
      }
    }
    if (!span) throw InputError("no activity in the input; pass --from and --to explicitly");
    if (!from) from = span->first;
    if (!to) to = span->second;
  }
  if (*from > *to)
    throw InvalidRangeError(fmt::format("month range {}..{} is empty", format_month(*from), format_month(*to)));
  scope.from = *from;
  scope.to = *to;
  return scope;
}

void add_compute_flags(CLI::App* cmd, ComputeFlags& f, bool with_thresholds, bool with_format) {
  cmd->add_option("stores", f.stores, "Canonical event-log files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--project", f.projects, "Restrict to these projects (default: all in the input)");
  cmd->add_option("--from", f.from, "First month, YYYY-MM (default: first active month)");
  cmd->add_option("--to", f.to, "Last month, YYYY-MM (default: last active month)");
  cmd->add_option("--labor", f.labor, "What counts as labor")
      ->check(CLI::IsMember({"commits", "commits+prs"}))
      ->capture_default_str();
  cmd->add_flag("--merged-only", f.merged_only, "Count only merged PRs as completed");
  if (with_thresholds) {
    cmd->add_option("--cv-threshold", f.cv_threshold, "Coefficient of variation treated as consistent")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--trend-threshold", f.trend_threshold, "Normalized monthly wealth slope treated as growth")
        ->capture_default_str();
  }
  if (with_format)
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--out", f.out, "Output path (default: standard output)");
  cmd->add_flag("--strict", f.strict, "Fail on the first malformed input line");
}

// Fills options the command line left unset from the config file.
void apply_config(CLI::App* cmd, const KeyValueConfig& config) {
  auto lookup = [&](const std::string& name) -> const std::vector<std::string>* {
    static const std::map<std::string, std::vector<std::string>> aliases{
        {"cv-threshold", {"pattern.cv_threshold", "cv_threshold"}},
        {"trend-threshold", {"pattern.trend_threshold", "trend_threshold"}},
        {"merged-only", {"merged_only"}},
        {"token-env", {"token_env"}},
        {"api-url", {"api_url"}},
        {"chart-asset", {"chart_asset"}},
    };
    if (const auto* v = config.find(name)) return v;
    if (const auto* v = config.find(fmt::format("{}.{}", cmd->get_name(), name))) return v;
    if (auto it = aliases.find(name); it != aliases.end())
      for (const auto& alias : it->second)
        if (const auto* v = config.find(alias)) return v;
    return nullptr;
  };
  for (auto* opt : cmd->get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const auto* values = lookup(opt->get_lnames().front());
    if (!values) continue;
    auto inputs = *values;
    if (opt->get_type_size() == 0) {
      // flags: CLI11 expects "true"/"false" style input
      if (inputs.size() != 1) throw UsageError(fmt::format("config key '{}' expects one value", opt->get_name()));
    }
    opt->clear();
    for (const auto& v : inputs) opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(fmt::format("config value for {}: {}", opt->get_name(), e.what()));
    }
  }
}

int run_compute(const ComputeFlags& flags) {
  auto scope = resolve_scope(flags);
  auto bundle = make_bundle(scope.store, scope.projects, scope.from, scope.to, flags.metrics(), flags.thresholds());
  write_atomic(flags.out, flags.format == "json" ? export_json(bundle) : export_csv(bundle));
  return kOk;
}

int run_classify(const ComputeFlags& flags) {
  auto scope = resolve_scope(flags);
  auto result = classify_all(scope.store, scope.projects, scope.from, scope.to, flags.metrics(), flags.thresholds());
  for (const auto& d : result.diagnostics) spdlog::warn("{}: {}", d.project_id, d.message);

  std::string out;
  if (flags.format == "json") {
    nlohmann::ordered_json doc;
    doc["labels"] = nlohmann::ordered_json::array();
    for (const auto& [project, label] : result.labels) {
      nlohmann::ordered_json row;
      row["project"] = project;
      row["pattern"] = to_string(label.label);
      row["health_cv"] = label.health_cv;
      row["wealth_cv"] = label.wealth_cv;
      row["wealth_trend"] = label.wealth_trend;
      doc["labels"].push_back(std::move(row));
    }
    doc["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : result.diagnostics) doc["diagnostics"].push_back({{"project", d.project_id}, {"message", d.message}});
    out = doc.dump(2) + "\n";
  } else {
    out = "project,pattern,health_cv,wealth_cv,wealth_trend\n";
    for (const auto& [project, label] : result.labels)
      out += fmt::format("{},{},{},{},{}\n", project, to_string(label.label), format_real(label.health_cv),
                         format_real(label.wealth_cv), format_real(label.wealth_trend));
  }
  write_atomic(flags.out, out);
  return kOk;
}

std::string find_chart_asset(const std::string& flag) {
  std::vector<fs::path> candidates;
  if (!flag.empty()) {
    if (!fs::exists(flag)) throw ChartAssetMissing(fmt::format("chart asset '{}' does not exist", flag));
    return read_text(flag);
  }
  if (const char* env = std::getenv("VITALS_CHART_ASSET"); env && *env) {
    if (!fs::exists(env)) throw ChartAssetMissing(fmt::format("VITALS_CHART_ASSET points to missing '{}'", env));
    return read_text(env);
  }
  std::error_code ec;
  auto exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) candidates.push_back(exe.parent_path() / "../share/vitals/vitals-chart.min.js");
  candidates.emplace_back("chart/dist/vitals-chart.min.js");
  for (const auto& c : candidates)
    if (fs::exists(c)) return read_text(c.string());
  throw ChartAssetMissing(
      "chart script not found; build the chart component (see README, \"Chart asset\") and pass "
      "--chart-asset PATH or set VITALS_CHART_ASSET");
}

Timestamp instant_flag(const std::string& name, const std::string& value) {
  try {
    if (value.size() == 7) return month_start(parse_month(value));
    return parse_timestamp(value);
  } catch (const InputError& e) {
    throw UsageError(fmt::format("--{}: {}", name, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vitals: monthly Health (median workforce) and Wealth (GPPR) series for OSS projects"};
  app.set_version_flag("--version", VITALS_VERSION);
  app.set_help_flag();
  app.set_help_all_flag("-h,--help", "Print this help message, including every command's flags, and exit");
  app.require_subcommand(1);

  std::string config_path;
  int verbosity = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "Key-value config file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", verbosity, "More logging on standard error (-vv for request-level debug)");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  // fetch
  std::vector<std::string> repos;
  std::string since, until, fetch_out, token_env = "VITALS_TOKEN", api_url = "https://api.github.com";
  auto* fetch = app.add_subcommand("fetch", "Download commits and pull requests from a hosted forge");
  fetch->add_option("--repo", repos, "Repository owner/name (repeatable)")->required();
  fetch->add_option("--since", since, "Window start: ISO-8601 instant, date or YYYY-MM")->required();
  fetch->add_option("--until", until, "Window end (exclusive)")->required();
  fetch->add_option("--out", fetch_out, "Output event log (default: standard output)");
  fetch->add_option("--token-env", token_env, "Environment variable holding the API token")->capture_default_str();
  fetch->add_option("--api-url", api_url, "Forge API base URL")->capture_default_str();

  // import
  std::vector<std::string> import_paths;
  std::string import_project, import_out;
  bool import_strict = false;
  auto* import = app.add_subcommand("import", "Merge event logs and git logs into one canonical event log");
  import->add_option("paths", import_paths, "Event logs or `git log --format='%H%x1f%ae%x1f%an%x1f%cI'` output")
      ->required()
      ->check(CLI::ExistingFile);
  import->add_option("--project", import_project, "Project id (owner/name) for git log inputs");
  import->add_option("--out", import_out, "Output event log (default: standard output)");
  import->add_flag("--strict", import_strict, "Fail on the first malformed input line");

  ComputeFlags compute_flags, classify_flags, report_flags;
  auto* compute = app.add_subcommand("compute", "Write monthly median-WF / GPPR series as CSV or JSON");
  add_compute_flags(compute, compute_flags, true, true);

  auto* classify = app.add_subcommand("classify", "Label each project's Health/Wealth evolution pattern");
  add_compute_flags(classify, classify_flags, true, true);

  // synth
  std::string spec_path, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic community event log from a spec file");
  synth->add_option("spec", spec_path, "Community spec (key-value file)")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "Override the spec's seed");
  synth->add_option("--out", synth_out, "Output event log (default: standard output)");

  // report
  std::string report_name, chart_asset;
  auto* report = app.add_subcommand("report", "Write a single-file animated Health-vs-Wealth HTML report");
  add_compute_flags(report, report_flags, true, false);
  report->add_option("--name", report_name, "Report name; output defaults to <name>.health-wealth.html");
  report->add_option("--chart-asset", chart_asset, "Built chart script (default: VITALS_CHART_ASSET or share/)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail(kUsage, "usage", e.what());
  }

  auto logger = spdlog::stderr_logger_mt("vitals");
  logger->set_pattern("%l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet ? spdlog::level::err
                          : verbosity >= 2 ? spdlog::level::debug
                          : verbosity == 1 ? spdlog::level::info
                                           : spdlog::level::warn);

  try {
    KeyValueConfig config;
    if (!config_path.empty()) config = KeyValueConfig::load(config_path);
    for (auto* cmd : app.get_subcommands()) apply_config(cmd, config);

    if (*fetch) {
      auto from = instant_flag("since", since);
      auto to = instant_flag("until", until);
      forge::FetchOptions options;
      if (const char* token = std::getenv(token_env.c_str()); token && *token) {
        options.token = token;
      } else {
        spdlog::warn("{} is not set; using unauthenticated requests", token_env);
      }
      std::vector<std::future<forge::FetchResult>> pending;
      for (const auto& repo : repos) {
        pending.push_back(std::async(std::launch::async, [&, repo] {
          auto transport = forge::make_http_transport(api_url);
          return forge::fetch_project_activity(*transport, repo, from, to, options);
        }));
      }
      std::vector<ContributionEvent> events;
      std::vector<PullRequestRecord> prs;
      for (std::size_t i = 0; i < pending.size(); ++i) {
        auto r = pending[i].get();
        spdlog::info("{}: {} events, {} pull requests, {} requests", repos[i], r.events.size(), r.prs.size(),
                     r.requests);
        events.insert(events.end(), r.events.begin(), r.events.end());
        prs.insert(prs.end(), r.prs.begin(), r.prs.end());
      }
      std::vector<std::string> provenance;
      for (const auto& repo : repos) provenance.push_back(fmt::format("forge:{}:{}", api_url, repo));
      write_atomic(fetch_out, serialize_event_log(dedupe_and_sort(events, prs, {}, provenance)));
    } else if (*import) {
      EventStore store;
      for (const auto& path : import_paths) {
        auto text = read_text(path);
        ParseResult r;
        try {
          if (looks_like_event_log(text)) {
            r = parse_event_log(text, ParseOptions{import_strict});
          } else {
            if (import_project.empty()) throw UsageError(fmt::format("{} is a git log; pass --project", path));
            r = import_git_log(text, import_project, ParseOptions{import_strict});
          }
        } catch (const InputError& e) {
          throw InputError(fmt::format("{}: {}", path, e.what()));
        }
        report_diagnostics(path, r);
        store = store.merged_with(dedupe_and_sort(std::move(r.events), std::move(r.prs), {}, {path}));
      }
      write_atomic(import_out, serialize_event_log(store));
    } else if (*compute) {
      return run_compute(compute_flags);
    } else if (*classify) {
      return run_classify(classify_flags);
    } else if (*synth) {
      auto spec = CommunitySpec::load(spec_path);
      if (synth_seed) spec.seed = *synth_seed;
      write_atomic(synth_out, serialize_event_log(generate(spec)));
    } else if (*report) {
      // resolve the asset first so a missing chart fails before any work
      auto asset = find_chart_asset(chart_asset);
      auto scope = resolve_scope(report_flags);
      auto bundle = make_bundle(scope.store, scope.projects, scope.from, scope.to, report_flags.metrics(),
                                report_flags.thresholds());
      bundle.tool_version = VITALS_VERSION;
      bundle.config_snapshot = {{"labor", report_flags.labor},
                                {"merged_only", report_flags.merged_only ? "true" : "false"},
                                {"cv_threshold", format_real(report_flags.cv_threshold)},
                                {"trend_threshold", format_real(report_flags.trend_threshold)}};
      auto name = report_name.empty() ? fs::path(report_flags.stores.front()).stem().string() : report_name;
      auto out = report_flags.out.empty() ? name + ".health-wealth.html" : report_flags.out;
      write_atomic(out, render_html(bundle, asset, name));
    }
  } catch (const UsageError& e) {
    fail(kUsage, "usage", e.what());
  } catch (const InvalidRangeError& e) {
    fail(kUsage, "invalid-range", e.what());
  } catch (const ChartAssetMissing& e) {
    fail(kInput, "missing-chart-asset", e.what());
  } catch (const AuthError& e) {
    fail(kNetwork, "auth", e.what());
  } catch (const RateLimitError& e) {
    fail(kNetwork, "rate-limit", e.what());
  } catch (const NetworkError& e) {
    fail(kNetwork, "network", e.what());
  } catch (const InputError& e) {
    fail(kInput, "input", e.what());
  } catch (const DomainError& e) {
    fail(kInput, "input", e.what());
  } catch (const std::exception& e) {
    fail(kInput, "internal", e.what());
  }
  return kOk;
}
