#include "vitals/forge.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "vitals/errors.hpp"

namespace vitals::forge {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string url_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

std::optional<long long> header_int(const HttpResponse& r, std::string_view name) {
  auto v = r.header(name);
  if (!v) return std::nullopt;
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{}) return std::nullopt;
  return out;
}

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(const std::string& base_url, std::chrono::seconds timeout) : client_(base_url) {
    client_.set_connection_timeout(timeout);
    client_.set_read_timeout(timeout);
    client_.set_follow_location(true);
  }

  HttpResponse get(const std::string& target, const HttpHeaders& headers) override {
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client_.Get(target, h);
    if (!result) throw TransportError(fmt::format("GET {} failed: {}", target, httplib::to_string(result.error())));
    HttpResponse out;
    out.status = result->status;
    out.body = result->body;
    for (const auto& [k, v] : result->headers) {
      auto key = lower(k);
      auto [it, inserted] = out.headers.emplace(key, v);
      if (!inserted) it->second += ", " + v;
    }
    return out;
  }

 private:
  httplib::Client client_;
};

class Session {
 public:
  Session(HttpTransport& transport, const FetchOptions& options) : transport_(transport), options_(options) {
    headers_ = {{"Accept", "application/vnd.github+json"},
                {"User-Agent", "vitals"},
                {"X-GitHub-Api-Version", "2022-11-28"}};
    if (options.token && !options.token->empty()) headers_.emplace_back("Authorization", "Bearer " + *options.token);
  }

  std::size_t requests() const { return requests_; }

  /// All items across pages starting at `target`.
  std::vector<json> paginate(std::string target) {
    std::vector<json> items;
    std::optional<std::string> next = std::move(target);
    while (next) {
      auto response = request(*next);
      json page;
      try {
        page = json::parse(response.body);
      } catch (const json::parse_error& e) {
        throw NetworkError(fmt::format("GET {}: response is not JSON: {}", *next, e.what()));
      }
      if (!page.is_array()) throw NetworkError(fmt::format("GET {}: expected a JSON array", *next));
      for (auto& item : page) items.push_back(std::move(item));
      auto link = response.header("link");
      next = link ? next_page_target(*link) : std::nullopt;
    }
    return items;
  }

 private:
  void sleep(std::chrono::seconds d) {
    spdlog::info("waiting {}s before the next forge request", d.count());
    if (options_.sleep) {
      options_.sleep(d);
    } else {
      std::this_thread::sleep_for(d);
    }
  }

  Timestamp now() const {
    if (options_.now) return options_.now();
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  }

  std::chrono::seconds until_reset(long long reset_epoch) const {
    auto wait = reset_epoch - now().time_since_epoch().count();
    return std::chrono::seconds(std::max<long long>(wait, 0) + 1);
  }

  HttpResponse request(const std::string& target) {
    int attempts = 0;
    int waits = 0;
    std::string last_error;
    auto backoff = [&](std::string error) {
      last_error = std::move(error);
      if (++attempts >= options_.max_attempts)
        throw NetworkError(fmt::format("GET {} failed after {} attempts: {}", target, attempts, last_error));
      spdlog::warn("GET {}: {} (attempt {}/{})", target, last_error, attempts, options_.max_attempts);
      sleep(options_.initial_backoff * (1 << (attempts - 1)));
    };

    while (true) {
      spdlog::debug("GET {}", target);
      ++requests_;
      HttpResponse r;
      try {
        r = transport_.get(target, headers_);
      } catch (const TransportError& e) {
        backoff(e.what());
        continue;
      }
      spdlog::debug("GET {} -> {}", target, r.status);

      if (r.status >= 500) {
        backoff(fmt::format("HTTP {}", r.status));
        continue;
      }
      if (r.status == 401)
        throw AuthError(
            "authentication rejected (HTTP 401); export a valid token in VITALS_TOKEN (or the variable named by "
            "--token-env)");
      if (r.status == 403 || r.status == 429) {
        std::optional<std::chrono::seconds> wait;
        if (auto retry_after = header_int(r, "retry-after")) {
          wait = std::chrono::seconds(std::max<long long>(*retry_after, 0));
        } else if (r.header("x-ratelimit-remaining") == std::optional<std::string>("0")) {
          auto reset = header_int(r, "x-ratelimit-reset");
          if (!reset) throw RateLimitError(fmt::format("GET {}: rate limit exhausted and no reset time given", target));
          wait = until_reset(*reset);
        } else if (r.status == 429) {
          throw RateLimitError(fmt::format("GET {}: HTTP 429 without retry or reset information", target));
        } else {
          throw AuthError(fmt::format("GET {}: access forbidden (HTTP 403); check the token's scopes", target));
        }
        if (++waits > options_.max_rate_limit_waits)
          throw RateLimitError(fmt::format("GET {}: still rate limited after {} waits", target, waits - 1));
        sleep(*wait);
        continue;
      }
      if (r.status == 404) throw InputError(fmt::format("GET {}: repository not found or not accessible", target));
      if (r.status < 200 || r.status >= 300) throw NetworkError(fmt::format("GET {}: HTTP {}", target, r.status));

      if (r.header("x-ratelimit-remaining") == std::optional<std::string>("0")) {
        if (auto reset = header_int(r, "x-ratelimit-reset")) sleep(until_reset(*reset));
      }
      return r;
    }
  }

  HttpTransport& transport_;
  const FetchOptions& options_;
  HttpHeaders headers_;
  std::size_t requests_ = 0;
};

std::optional<std::string> string_at(const json& obj, std::initializer_list<const char*> path) {
  const json* cur = &obj;
  for (const char* key : path) {
    if (!cur->is_object()) return std::nullopt;
    auto it = cur->find(key);
    if (it == cur->end()) return std::nullopt;
    cur = &*it;
  }
  if (cur->is_string()) return cur->get<std::string>();
  if (cur->is_number_integer()) return std::to_string(cur->get<long long>());
  return std::nullopt;
}

bool in_window(Timestamp t, Timestamp since, Timestamp until) { return since <= t && t < until; }

}  // namespace

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  auto it = headers.find(lower(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(base_url, timeout);
}

CassetteTransport::CassetteTransport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read cassette '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  load(buffer.str());
}

CassetteTransport CassetteTransport::from_string(std::string_view json_text) {
  CassetteTransport t;
  t.load(json_text);
  return t;
}

void CassetteTransport::load(std::string_view json_text) {
  try {
    auto doc = json::parse(json_text);
    for (const auto& entry : doc.at("interactions")) {
      Interaction i;
      i.target = entry.at("request").at("target").get<std::string>();
      const auto& resp = entry.at("response");
      if (resp.contains("transport_error")) {
        i.transport_error = resp.at("transport_error").get<std::string>();
      } else {
        HttpResponse r;
        r.status = resp.at("status").get<int>();
        if (resp.contains("headers"))
          for (const auto& [k, v] : resp.at("headers").items()) r.headers[lower(k)] = v.get<std::string>();
        if (resp.contains("body")) {
          const auto& body = resp.at("body");
          r.body = body.is_string() ? body.get<std::string>() : body.dump();
        }
        i.response = std::move(r);
      }
      interactions_.push_back(std::move(i));
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("invalid cassette: {}", e.what()));
  }
}

HttpResponse CassetteTransport::get(const std::string& target, const HttpHeaders& headers) {
  requests_.push_back(target);
  last_headers_ = headers;
  for (auto& i : interactions_) {
    if (i.used || i.target != target) continue;
    i.used = true;
    if (!i.response) throw TransportError(i.transport_error);
    return *i.response;
  }
  throw TransportError(fmt::format("cassette has no recorded response for GET {}", target));
}

std::optional<std::string> next_page_target(std::string_view link_header) {
  // <https://api.github.com/repositories/1/commits?page=2>; rel="next", <...>; rel="last"
  std::size_t pos = 0;
  while (pos < link_header.size()) {
    auto open = link_header.find('<', pos);
    if (open == std::string_view::npos) break;
    auto close = link_header.find('>', open);
    if (close == std::string_view::npos) break;
    auto end = link_header.find(',', close);
    auto params = link_header.substr(close + 1, end == std::string_view::npos ? std::string_view::npos : end - close - 1);
    if (params.find("rel=\"next\"") != std::string_view::npos || params.find("rel=next") != std::string_view::npos) {
      auto url = link_header.substr(open + 1, close - open - 1);
      if (auto scheme = url.find("://"); scheme != std::string_view::npos) {
        auto path = url.find('/', scheme + 3);
        url = path == std::string_view::npos ? std::string_view("/") : url.substr(path);
      }
      return std::string(url);
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

FetchResult fetch_project_activity(HttpTransport& transport, const std::string& repo, Timestamp since,
                                   Timestamp until, const FetchOptions& options) {
  auto slash = repo.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == repo.size() || repo.find('/', slash + 1) != std::string::npos)
    throw InputError(fmt::format("repository '{}' is not of the form owner/name", repo));
  if (!(since < until)) throw InputError("fetch window is empty: since must precede until");
  if (options.per_page < 1 || options.per_page > 100) throw InputError("per_page must lie in [1, 100]");

  Session session(transport, options);
  FetchResult result;

  auto commits = session.paginate(fmt::format("/repos/{}/commits?since={}&until={}&per_page={}", repo,
                                              url_encode(format_timestamp(since)), url_encode(format_timestamp(until)),
                                              options.per_page));
  for (const auto& c : commits) {
    auto sha = string_at(c, {"sha"});
    auto date = string_at(c, {"commit", "committer", "date"});
    if (!date) date = string_at(c, {"commit", "author", "date"});
    auto who = string_at(c, {"author", "login"});
    if (!who) {
      if (auto email = string_at(c, {"commit", "author", "email"})) who = normalize_email(*email);
    }
    if (!sha || !date || !who || who->empty()) {
      spdlog::warn("{}: skipping commit record without sha, date or author", repo);
      continue;
    }
    auto when = parse_timestamp(*date);
    if (!in_window(when, since, until)) continue;
    result.events.push_back({repo, *who, when, EventKind::Commit, *sha});
  }

  auto pulls = session.paginate(
      fmt::format("/repos/{}/pulls?state=all&sort=created&direction=asc&per_page={}", repo, options.per_page));
  for (const auto& p : pulls) {
    auto number = string_at(p, {"number"});
    auto author = string_at(p, {"user", "login"});
    auto created = string_at(p, {"created_at"});
    if (!number || !author || !created) {
      spdlog::warn("{}: skipping pull request without number, author or creation time", repo);
      continue;
    }
    PullRequestRecord pr{repo, *number, *author, parse_timestamp(*created), std::nullopt, false};
    if (auto closed = string_at(p, {"closed_at"})) pr.closed_at = parse_timestamp(*closed);
    pr.merged = string_at(p, {"merged_at"}).has_value();
    const bool opened_here = in_window(pr.opened_at, since, until);
    const bool closed_here = pr.closed_at && in_window(*pr.closed_at, since, until);
    if (!opened_here && !closed_here) continue;
    if (opened_here)
      result.events.push_back({repo, pr.author_id, pr.opened_at, EventKind::PullRequestSubmitted, pr.pr_id});
    result.prs.push_back(std::move(pr));
  }

  result.requests = session.requests();
  return result;
}

}  // namespace vitals::forge
