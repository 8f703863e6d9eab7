#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include <json.hpp>

#include "eventpulse/credentials.hpp"
#include "eventpulse/oauth.hpp"
#include "eventpulse/time.hpp"

namespace eventpulse {

/// Receives one raw record line (no terminator). Returning false ends the connection.
using LineSink = std::function<bool(std::string_view)>;

enum class StreamEnd {
  disconnected,  // connection failed or was closed by the remote side
  stopped,       // the stop token fired
  exhausted,     // a finite source has nothing more to deliver
};

/// A push source of newline-delimited records. run() holds one connection open.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  virtual StreamEnd run(std::span<const std::string> track_terms, const LineSink& on_line,
                        std::stop_token stop) = 0;
};

enum class ResultType { recent, popular };

struct SearchRequest {
  std::vector<std::string> terms;
  ResultType result_type = ResultType::recent;
  std::optional<std::string> cursor;
};

struct SearchPage {
  enum class Status { ok, rate_limited, failed };
  Status status = Status::ok;
  std::vector<std::string> records;
  std::optional<std::string> next_cursor;
  std::optional<Timestamp> reset_at;  // set with rate_limited
  std::string error;
};

/// A pull source answering paged queries.
class QuerySource {
 public:
  virtual ~QuerySource() = default;
  virtual SearchPage fetch(const SearchRequest& request) = 0;
};

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Endpoint split_url(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos) throw std::invalid_argument("not an absolute URL: " + std::string(url));
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

// Splits "a=1&b=2" (leading "?" allowed) into decoded pairs.
inline oauth::Params parse_query(std::string_view q) {
  if (!q.empty() && q.front() == '?') q.remove_prefix(1);
  oauth::Params out;
  while (!q.empty()) {
    auto amp = q.find('&');
    auto part = q.substr(0, amp);
    auto eq = part.find('=');
    std::string key = httplib::detail::decode_url(std::string(part.substr(0, eq)), true);
    std::string value =
        eq == std::string_view::npos ? "" : httplib::detail::decode_url(std::string(part.substr(eq + 1)), true);
    if (!key.empty()) out.emplace_back(std::move(key), std::move(value));
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

inline std::string build_query(const oauth::Params& params) {
  std::string q;
  for (const auto& [k, v] : params) {
    q += q.empty() ? '?' : '&';
    q += oauth::percent_encode(k) + '=' + oauth::percent_encode(v);
  }
  return q;
}

inline std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Streaming client over HTTP(S): GET <path>?track=<terms> and read LF-delimited records until
/// the server closes, the read stalls, or stop fires. Signs with OAuth 1.0a when credentials
/// are given; otherwise connects unsigned (replay/mock servers).
class HttpStreamSource final : public StreamSource {
 public:
  explicit HttpStreamSource(std::string url, std::optional<Credentials> creds = std::nullopt,
                            std::chrono::seconds stall_timeout = std::chrono::seconds{90})
      : url_(std::move(url)), endpoint_(detail::split_url(url_)), creds_(std::move(creds)),
        stall_timeout_(stall_timeout) {}

  StreamEnd run(std::span<const std::string> track_terms, const LineSink& on_line,
                std::stop_token stop) override {
    if (stop.stop_requested()) return StreamEnd::stopped;
    httplib::Client cli(endpoint_.origin);
    cli.set_connection_timeout(std::chrono::seconds{10});
    cli.set_read_timeout(stall_timeout_);
    std::stop_callback on_stop(stop, [&cli] { cli.stop(); });

    oauth::Params params{{"track", detail::join(track_terms, ",")}};
    httplib::Headers headers;
    if (creds_)
      headers.emplace("Authorization", oauth::authorization_header("GET", url_, params, *creds_));

    std::string buffer;
    bool sink_ended = false;
    cli.Get(
        endpoint_.path + detail::build_query(params), headers,
        [](const httplib::Response& r) { return r.status == 200; },
        [&](const char* data, std::size_t len) {
          buffer.append(data, len);
          std::size_t start = 0;
          for (auto nl = buffer.find('\n', start); nl != std::string::npos; nl = buffer.find('\n', start)) {
            std::string_view line(buffer.data() + start, nl - start);
            start = nl + 1;
            if (!on_line(line)) {
              sink_ended = true;
              return false;
            }
          }
          buffer.erase(0, start);
          return !stop.stop_requested();
        });
    // An unterminated trailing fragment is a truncated record; drop it.
    if (stop.stop_requested() || sink_ended) return StreamEnd::stopped;
    return StreamEnd::disconnected;
  }

 private:
  std::string url_;
  detail::Endpoint endpoint_;
  std::optional<Credentials> creds_;
  std::chrono::seconds stall_timeout_;
};

/// Replays a local archive as a finite stream without any network.
class FileReplaySource final : public StreamSource {
 public:
  explicit FileReplaySource(std::filesystem::path path, std::chrono::milliseconds delay = {})
      : path_(std::move(path)), delay_(delay) {}

  StreamEnd run(std::span<const std::string>, const LineSink& on_line, std::stop_token stop) override {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return StreamEnd::disconnected;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
      if (index++ < delivered_) continue;
      if (stop.stop_requested()) return StreamEnd::stopped;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!on_line(line)) return StreamEnd::stopped;
      ++delivered_;
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    }
    return StreamEnd::exhausted;
  }

 private:
  std::filesystem::path path_;
  std::chrono::milliseconds delay_;
  std::size_t delivered_ = 0;
};

/// Paged search over HTTP(S). Understands two response shapes:
///  - application/x-ndjson: one record per line, continuation in the X-Next-Cursor header;
///  - JSON object {"statuses":[...], "search_metadata":{"next_results":"?..."}}.
/// HTTP 429 (or 420) maps to rate_limited with the reset time from x-rate-limit-reset.
class HttpQuerySource final : public QuerySource {
 public:
  explicit HttpQuerySource(std::string url, std::optional<Credentials> creds = std::nullopt,
                           std::size_t page_size = 100)
      : url_(std::move(url)), endpoint_(detail::split_url(url_)), creds_(std::move(creds)),
        page_size_(page_size) {}

  SearchPage fetch(const SearchRequest& request) override {
    oauth::Params params;
    if (request.cursor && !request.cursor->empty() && request.cursor->front() == '?') {
      params = detail::parse_query(*request.cursor);
    } else {
      params = {{"q", detail::join(request.terms, " OR ")},
                {"result_type", request.result_type == ResultType::popular ? "popular" : "recent"},
                {"count", std::to_string(page_size_)}};
      if (request.cursor) params.emplace_back("cursor", *request.cursor);
    }
    httplib::Client cli(endpoint_.origin);
    cli.set_connection_timeout(std::chrono::seconds{10});
    cli.set_read_timeout(std::chrono::seconds{60});
    httplib::Headers headers;
    if (creds_)
      headers.emplace("Authorization", oauth::authorization_header("GET", url_, params, *creds_));

    SearchPage page;
    auto res = cli.Get(endpoint_.path + detail::build_query(params), headers);
    if (!res) {
      page.status = SearchPage::Status::failed;
      page.error = httplib::to_string(res.error());
      return page;
    }
    if (res->status == 429 || res->status == 420) {
      page.status = SearchPage::Status::rate_limited;
      if (res->has_header("x-rate-limit-reset")) {
        try {
          page.reset_at = Timestamp{std::chrono::seconds{std::stoll(res->get_header_value("x-rate-limit-reset"))}};
        } catch (const std::exception&) {
        }
      }
      return page;
    }
    if (res->status != 200) {
      page.status = SearchPage::Status::failed;
      page.error = "HTTP " + std::to_string(res->status);
      return page;
    }
    const auto content_type = res->get_header_value("Content-Type");
    if (content_type.find("ndjson") != std::string::npos) {
      std::string_view body = res->body;
      while (!body.empty()) {
        auto nl = body.find('\n');
        auto line = body.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        page.records.emplace_back(line);
        if (nl == std::string_view::npos) break;
        body.remove_prefix(nl + 1);
      }
      if (res->has_header("X-Next-Cursor")) page.next_cursor = res->get_header_value("X-Next-Cursor");
      return page;
    }
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("statuses") || !doc["statuses"].is_array()) {
      page.status = SearchPage::Status::failed;
      page.error = "unrecognized search response";
      return page;
    }
    for (const auto& status : doc["statuses"]) page.records.push_back(status.dump());
    if (auto meta = doc.find("search_metadata"); meta != doc.end() && meta->is_object()) {
      if (auto next = meta->find("next_results"); next != meta->end() && next->is_string())
        page.next_cursor = next->get<std::string>();
    }
    return page;
  }

 private:
  std::string url_;
  detail::Endpoint endpoint_;
  std::optional<Credentials> creds_;
  std::size_t page_size_;
};

}  // namespace eventpulse
