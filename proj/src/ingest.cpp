#include "vitals/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "vitals/errors.hpp"

namespace vitals {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

auto event_key(const ContributionEvent& e) { return std::tie(e.project_id, e.kind, e.source_ref); }

auto event_order(const ContributionEvent& e) {
  return std::tie(e.timestamp, e.project_id, e.source_ref, e.kind, e.contributor_id);
}

auto pr_order(const PullRequestRecord& p) { return std::tie(p.project_id, p.opened_at, p.pr_id); }

// Total order on conflicting records for one PR id; the greatest wins.
bool less_complete(const PullRequestRecord& a, const PullRequestRecord& b) {
  auto closed = [](const PullRequestRecord& p) { return p.closed_at.value_or(Timestamp{}); };
  auto ka = std::make_tuple(a.closed_at.has_value(), closed(a), a.merged);
  auto kb = std::make_tuple(b.closed_at.has_value(), closed(b), b.merged);
  if (ka != kb) return ka < kb;
  // earlier opening and smaller author win the remaining ties
  return std::tie(b.opened_at, b.author_id) < std::tie(a.opened_at, a.author_id);
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LineError(fmt::format("missing field '{}'", key));
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw LineError(fmt::format("field '{}' must be a string", key));
  auto s = v.get<std::string>();
  if (trim(s).empty()) throw LineError(fmt::format("field '{}' is empty", key));
  return s;
}

// Refs may be written as numbers by hand (e.g. PR numbers).
std::string require_ref(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return require_string(obj, key);
}

Timestamp require_time(const json& obj, const char* key) {
  auto text = require_string(obj, key);
  try {
    return parse_timestamp(text);
  } catch (const InputError& e) {
    throw LineError(fmt::format("field '{}': {}", key, e.what()));
  }
}

void record(ParseResult& result, const ParseOptions& options, std::size_t line, std::string message) {
  if (options.strict) throw InputError(fmt::format("line {}: {}", line, message));
  result.diagnostics.push_back({line, std::move(message)});
}

void parse_event_line(std::string_view line, ParseResult& out) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error&) {
    throw LineError("not a valid JSON object");
  }
  if (!obj.is_object()) throw LineError("not a JSON object");

  auto type = require_string(obj, "type");
  if (type == "commit" || type == "pr_submitted") {
    ContributionEvent e;
    e.kind = type == "commit" ? EventKind::Commit : EventKind::PullRequestSubmitted;
    e.project_id = require_string(obj, "project");
    e.contributor_id = require_string(obj, "contributor");
    e.timestamp = require_time(obj, "timestamp");
    e.source_ref = require_ref(obj, "ref");
    out.events.push_back(std::move(e));
  } else if (type == "pr_record") {
    PullRequestRecord p;
    p.project_id = require_string(obj, "project");
    p.pr_id = require_ref(obj, "pr_id");
    p.author_id = require_string(obj, "author");
    p.opened_at = require_time(obj, "opened_at");
    if (const auto& closed = require(obj, "closed_at"); !closed.is_null()) {
      p.closed_at = require_time(obj, "closed_at");
      if (*p.closed_at < p.opened_at) throw LineError("closed_at precedes opened_at");
    }
    const auto& merged = require(obj, "merged");
    if (!merged.is_boolean()) throw LineError("field 'merged' must be a boolean");
    p.merged = merged.get<bool>();
    out.prs.push_back(std::move(p));
  } else {
    throw LineError(fmt::format("unknown record type '{}'", type));
  }
}

template <typename LineFn>
ParseResult parse_lines(std::istream& in, const ParseOptions& options, LineFn&& fn) {
  ParseResult result;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    try {
      fn(line, result);
    } catch (const LineError& e) {
      record(result, options, line_no, e.what());
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Commit:
      return "commit";
    case EventKind::PullRequestSubmitted:
      return "pr_submitted";
  }
  return "unknown";
}

bool is_bot(std::string_view contributor_id, const IngestOptions& options) {
  return std::any_of(options.bot_suffixes.begin(), options.bot_suffixes.end(), [&](const std::string& suffix) {
    return !suffix.empty() && contributor_id.ends_with(suffix);
  });
}

std::string normalize_email(std::string_view email) {
  std::string out(trim(email));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

EventStore dedupe_and_sort(std::vector<ContributionEvent> events, std::vector<PullRequestRecord> prs,
                           const IngestOptions& options, std::vector<std::string> provenance) {
  std::erase_if(events, [&](const ContributionEvent& e) { return is_bot(e.contributor_id, options); });
  std::erase_if(prs, [&](const PullRequestRecord& p) { return is_bot(p.author_id, options); });

  // Among duplicates keep the earliest (timestamp, contributor).
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.project_id, a.kind, a.source_ref, a.timestamp, a.contributor_id) <
           std::tie(b.project_id, b.kind, b.source_ref, b.timestamp, b.contributor_id);
  });
  events.erase(std::unique(events.begin(), events.end(),
                           [](const auto& a, const auto& b) { return event_key(a) == event_key(b); }),
               events.end());
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return event_order(a) < event_order(b); });

  std::map<std::pair<std::string, std::string>, PullRequestRecord> by_id;
  for (auto& p : prs) {
    auto key = std::make_pair(p.project_id, p.pr_id);
    auto it = by_id.find(key);
    if (it == by_id.end()) {
      by_id.emplace(std::move(key), std::move(p));
    } else if (less_complete(it->second, p)) {
      it->second = std::move(p);
    }
  }
  std::vector<PullRequestRecord> unique_prs;
  unique_prs.reserve(by_id.size());
  for (auto& [key, p] : by_id) unique_prs.push_back(std::move(p));
  std::sort(unique_prs.begin(), unique_prs.end(), [](const auto& a, const auto& b) { return pr_order(a) < pr_order(b); });

  std::sort(provenance.begin(), provenance.end());
  provenance.erase(std::unique(provenance.begin(), provenance.end()), provenance.end());

  EventStore store;
  store.events_ = std::move(events);
  store.prs_ = std::move(unique_prs);
  store.provenance_ = std::move(provenance);
  return store;
}

std::vector<std::string> EventStore::projects() const {
  std::set<std::string> ids;
  for (const auto& e : events_) ids.insert(e.project_id);
  for (const auto& p : prs_) ids.insert(p.project_id);
  return {ids.begin(), ids.end()};
}

std::optional<std::pair<MonthIndex, MonthIndex>> EventStore::activity_span(std::string_view project_id) const {
  std::optional<std::pair<MonthIndex, MonthIndex>> span;
  auto touch = [&](Timestamp t) {
    auto m = month_of(t);
    if (!span) {
      span.emplace(m, m);
    } else {
      span->first = std::min(span->first, m);
      span->second = std::max(span->second, m);
    }
  };
  for (const auto& e : events_)
    if (project_id.empty() || e.project_id == project_id) touch(e.timestamp);
  for (const auto& p : prs_) {
    if (!project_id.empty() && p.project_id != project_id) continue;
    touch(p.opened_at);
    if (p.closed_at) touch(*p.closed_at);
  }
  return span;
}

EventStore EventStore::merged_with(const EventStore& other, const IngestOptions& options) const {
  auto events = events_;
  events.insert(events.end(), other.events_.begin(), other.events_.end());
  auto prs = prs_;
  prs.insert(prs.end(), other.prs_.begin(), other.prs_.end());
  auto provenance = provenance_;
  provenance.insert(provenance.end(), other.provenance_.begin(), other.provenance_.end());
  return dedupe_and_sort(std::move(events), std::move(prs), options, std::move(provenance));
}

ParseResult parse_event_log(std::istream& in, const ParseOptions& options) {
  return parse_lines(in, options, parse_event_line);
}

ParseResult parse_event_log(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in, options);
}

void write_event_log(std::ostream& out, const EventStore& store) {
  for (const auto& e : store.events()) {
    ordered_json line;
    line["type"] = to_string(e.kind);
    line["project"] = e.project_id;
    line["contributor"] = e.contributor_id;
    line["timestamp"] = format_timestamp(e.timestamp);
    line["ref"] = e.source_ref;
    out << line.dump() << '\n';
  }
  for (const auto& p : store.prs()) {
    ordered_json line;
    line["type"] = "pr_record";
    line["project"] = p.project_id;
    line["pr_id"] = p.pr_id;
    line["author"] = p.author_id;
    line["opened_at"] = format_timestamp(p.opened_at);
    line["closed_at"] = p.closed_at ? ordered_json(format_timestamp(*p.closed_at)) : ordered_json(nullptr);
    line["merged"] = p.merged;
    out << line.dump() << '\n';
  }
}

std::string serialize_event_log(const EventStore& store) {
  std::ostringstream out;
  write_event_log(out, store);
  return out.str();
}

ParseResult import_git_log(std::istream& in, std::string_view project_id, const ParseOptions& options) {
  constexpr char kUnitSeparator = '\x1f';
  std::string project(project_id);
  return parse_lines(in, options, [&](std::string_view line, ParseResult& out) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      auto pos = line.find(kUnitSeparator, start);
      fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (fields.size() != 4)
      throw LineError(fmt::format("expected 4 unit-separated fields, found {}", fields.size()));
    auto hash = trim(fields[0]);
    auto email = normalize_email(fields[1]);
    if (hash.empty()) throw LineError("empty commit hash");
    if (email.empty()) throw LineError("empty author email");
    Timestamp when;
    try {
      when = parse_timestamp(trim(fields[3]));
    } catch (const InputError& e) {
      throw LineError(e.what());
    }
    out.events.push_back({project, email, when, EventKind::Commit, std::string(hash)});
  });
}

ParseResult import_git_log(std::string_view text, std::string_view project_id, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return import_git_log(in, project_id, options);
}

}  // namespace vitals
