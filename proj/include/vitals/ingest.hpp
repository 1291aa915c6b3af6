#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/time.hpp"

namespace vitals {

/// Only labor-bearing activity exists as an event. Issues and comments are
/// never ingested.
enum class EventKind { Commit, PullRequestSubmitted };

std::string_view to_string(EventKind kind);

struct ContributionEvent {
  std::string project_id;
  std::string contributor_id;
  Timestamp timestamp;
  EventKind kind = EventKind::Commit;
  std::string source_ref;  // commit hash or PR number

  bool operator==(const ContributionEvent&) const = default;
};

struct PullRequestRecord {
  std::string project_id;
  std::string pr_id;
  std::string author_id;
  Timestamp opened_at;
  std::optional<Timestamp> closed_at;
  bool merged = false;

  bool operator==(const PullRequestRecord&) const = default;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct ParseOptions {
  /// Throw InputError on the first malformed line instead of collecting diagnostics.
  bool strict = false;
};

struct ParseResult {
  std::vector<ContributionEvent> events;
  std::vector<PullRequestRecord> prs;
  std::vector<Diagnostic> diagnostics;
};

struct IngestOptions {
  /// Contributors whose id ends with one of these are dropped, along with
  /// the PRs they authored.
  std::vector<std::string> bot_suffixes{"[bot]"};
};

bool is_bot(std::string_view contributor_id, const IngestOptions& options);

/// Canonical, deduplicated and sorted collection of events and PR records.
///
/// Events are ordered by (timestamp, project, ref) with kind and contributor
/// as final tie-breakers; PR records by (project, opened_at, pr_id). A store
/// is immutable once built and can be shared read-only across threads.
class EventStore {
 public:
  EventStore() = default;

  const std::vector<ContributionEvent>& events() const { return events_; }
  const std::vector<PullRequestRecord>& prs() const { return prs_; }
  const std::vector<std::string>& provenance() const { return provenance_; }

  bool empty() const { return events_.empty() && prs_.empty(); }

  /// Sorted distinct project ids across events and PRs.
  std::vector<std::string> projects() const;

  /// Earliest and latest month touched by any event or PR timestamp of the
  /// project (all projects when project_id is empty).
  std::optional<std::pair<MonthIndex, MonthIndex>> activity_span(std::string_view project_id = {}) const;

  /// Union of two stores, re-normalized.
  EventStore merged_with(const EventStore& other, const IngestOptions& options = {}) const;

  bool operator==(const EventStore&) const = default;

 private:
  friend EventStore dedupe_and_sort(std::vector<ContributionEvent>, std::vector<PullRequestRecord>,
                                    const IngestOptions&, std::vector<std::string>);

  std::vector<ContributionEvent> events_;
  std::vector<PullRequestRecord> prs_;
  std::vector<std::string> provenance_;
};

/// Normalizes raw records into a store. Duplicates by (project, kind, ref)
/// collapse to one event; duplicate PR ids per project collapse to the most
/// complete record. The result does not depend on input order and the
/// operation is idempotent.
EventStore dedupe_and_sort(std::vector<ContributionEvent> events, std::vector<PullRequestRecord> prs,
                           const IngestOptions& options = {}, std::vector<std::string> provenance = {});

/// Reads the line-delimited canonical event log. Blank lines are skipped;
/// unknown fields are ignored.
ParseResult parse_event_log(std::istream& in, const ParseOptions& options = {});
ParseResult parse_event_log(std::string_view text, const ParseOptions& options = {});

/// Writes a store in the canonical event-log format. Events come first,
/// then PR records, each in store order.
std::string serialize_event_log(const EventStore& store);
void write_event_log(std::ostream& out, const EventStore& store);

/// Reads `git log --format='%H%x1f%ae%x1f%an%x1f%cI'` output. Every entry
/// becomes one Commit event attributed to the lowercased, trimmed author
/// email.
ParseResult import_git_log(std::istream& in, std::string_view project_id, const ParseOptions& options = {});
ParseResult import_git_log(std::string_view text, std::string_view project_id,
                           const ParseOptions& options = {});

/// lowercase + trim
std::string normalize_email(std::string_view email);

}  // namespace vitals
