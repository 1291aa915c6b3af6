#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vitals/ingest.hpp"
#include "vitals/time.hpp"

namespace vitals::forge {

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // names lowercased
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Raised by a transport when no HTTP response could be obtained.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GET-only HTTP seam so the client can run against recorded cassettes.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// `target` is a path plus query string, e.g. "/repos/o/n/commits?page=2".
  virtual HttpResponse get(const std::string& target, const HttpHeaders& headers) = 0;
};

/// Live transport backed by cpp-httplib. `base_url` is scheme + host, e.g.
/// "https://api.github.com".
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::seconds timeout = std::chrono::seconds(30));

/// Replays a recorded JSON cassette:
///
///   {"interactions": [{"request": {"target": "/repos/..."},
///                      "response": {"status": 200, "headers": {...}, "body": ...}}]}
///
/// Requests are matched by exact target, in recorded order for repeated
/// targets. A `"transport_error": "..."` response entry raises TransportError.
class CassetteTransport : public HttpTransport {
 public:
  explicit CassetteTransport(const std::filesystem::path& path);
  static CassetteTransport from_string(std::string_view json_text);

  HttpResponse get(const std::string& target, const HttpHeaders& headers) override;

  std::size_t requests_issued() const { return requests_.size(); }
  const std::vector<std::string>& requests() const { return requests_; }
  /// Headers of the most recent request.
  const HttpHeaders& last_headers() const { return last_headers_; }

 private:
  CassetteTransport() = default;
  void load(std::string_view json_text);

  struct Interaction {
    std::string target;
    std::optional<HttpResponse> response;
    std::string transport_error;
    bool used = false;
  };
  std::vector<Interaction> interactions_;
  std::vector<std::string> requests_;
  HttpHeaders last_headers_;
};

struct FetchOptions {
  std::optional<std::string> token;
  int per_page = 100;
  /// Attempts per request for transport failures and 5xx responses.
  int max_attempts = 4;
  /// Upper bound on consecutive rate-limit waits for one request.
  int max_rate_limit_waits = 10;
  std::chrono::seconds initial_backoff{1};
  /// Defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::seconds)> sleep;
  /// Defaults to the system clock.
  std::function<Timestamp()> now;
};

struct FetchResult {
  std::vector<ContributionEvent> events;
  std::vector<PullRequestRecord> prs;
  std::size_t requests = 0;
};

/// Lists commits and pull requests of `repo` ("owner/name") with relevant
/// timestamps in [since, until). Commits count by committer date; a PR is
/// kept when it was opened or closed in the window, and yields a submission
/// event when it was opened in the window. Pages are followed through the
/// Link header until exhausted; rate limits are waited out.
///
/// Throws AuthError, RateLimitError, NetworkError, InputError (bad repo or
/// window).
FetchResult fetch_project_activity(HttpTransport& transport, const std::string& repo, Timestamp since,
                                   Timestamp until, const FetchOptions& options = {});

/// Next-page target from a Link header, with scheme and host stripped.
std::optional<std::string> next_page_target(std::string_view link_header);

}  // namespace vitals::forge
