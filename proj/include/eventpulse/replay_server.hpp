#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "eventpulse/time.hpp"

namespace eventpulse {

/// Local stand-in for the platform endpoints.
///
///   GET /stream?track=a,b   streams `lines` as LF-delimited records. The n-th connection
///                           replays sessions[n] (a half-open line range), then either drops
///                           the connection or holds it open sending blank keep-alive lines.
///                           Connections past the script hold open with keep-alives only.
///   GET /search?q=..&cursor=N
///                           returns page_size records from offset N as application/x-ndjson
///                           with X-Next-Cursor while more remain. Request ordinals listed in
///                           rate_limited_requests get HTTP 429 with x-rate-limit-reset.
class ReplayServer {
 public:
  struct Session {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool hold_open = false;
    bool cut_mid_line = false;  // on drop, send the first half of the next record first
  };

  struct Options {
    std::vector<std::string> lines;
    std::vector<Session> sessions;  // empty: one session over all lines, held open
    std::chrono::milliseconds line_delay{0};
    std::size_t keepalive_every = 0;  // emit a blank line after every n records
    std::size_t page_size = 100;
    std::set<std::size_t> rate_limited_requests;
    Timestamp rate_limit_reset{};
  };

  explicit ReplayServer(Options options) : options_(std::move(options)) {
    if (options_.sessions.empty()) options_.sessions.push_back({0, options_.lines.size(), true, false});
    for (const auto& s : options_.sessions)
      if (s.begin > s.end || s.end > options_.lines.size()) throw std::invalid_argument("bad session range");
    install_routes();
  }

  ReplayServer(const ReplayServer&) = delete;
  ReplayServer& operator=(const ReplayServer&) = delete;

  ~ReplayServer() { stop(); }

  /// Binds to an ephemeral port on 127.0.0.1 (or `port` when non-zero) and serves in the background.
  int start(int port = 0, const std::string& host = "127.0.0.1") {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
    } else {
      port_ = server_.bind_to_port(host, port) ? port : -1;
    }
    if (port_ <= 0) throw std::runtime_error("replay server cannot bind " + host);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    stopping_ = true;
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::size_t stream_connections() const { return stream_connections_.load(); }
  std::size_t search_requests() const { return search_requests_.load(); }

  std::vector<std::string> track_params() const {
    std::lock_guard lock(mutex_);
    return track_params_;
  }

  std::vector<std::string> search_queries() const {
    std::lock_guard lock(mutex_);
    return search_queries_;
  }

 private:
  struct StreamState {
    Session session;
    std::size_t next = 0;
    std::size_t since_keepalive = 0;
  };

  void install_routes() {
    server_.Get("/stream", [this](const httplib::Request& req, httplib::Response& res) {
      auto n = stream_connections_.fetch_add(1);
      {
        std::lock_guard lock(mutex_);
        track_params_.push_back(req.get_param_value("track"));
      }
      auto state = std::make_shared<StreamState>();
      state->session = n < options_.sessions.size() ? options_.sessions[n]
                                                    : Session{0, 0, true, false};
      state->next = state->session.begin;
      res.set_chunked_content_provider("application/json", [this, state](std::size_t, httplib::DataSink& sink) {
        return pump(*state, sink);
      });
    });

    server_.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      auto n = search_requests_.fetch_add(1);
      {
        std::lock_guard lock(mutex_);
        search_queries_.push_back(req.get_param_value("q"));
      }
      if (options_.rate_limited_requests.count(n)) {
        res.status = 429;
        res.set_header("x-rate-limit-reset",
                       std::to_string(options_.rate_limit_reset.time_since_epoch().count()));
        res.set_content("{\"errors\":[{\"code\":88,\"message\":\"Rate limit exceeded\"}]}", "application/json");
        return;
      }
      std::size_t offset = 0;
      if (req.has_param("cursor")) offset = std::stoul(req.get_param_value("cursor"));
      offset = std::min(offset, options_.lines.size());
      auto end = std::min(offset + options_.page_size, options_.lines.size());
      std::string body;
      for (auto i = offset; i < end; ++i) body += options_.lines[i] + '\n';
      if (end < options_.lines.size()) res.set_header("X-Next-Cursor", std::to_string(end));
      res.set_content(body, "application/x-ndjson");
    });
  }

  bool pump(StreamState& st, httplib::DataSink& sink) {
    if (stopping_) return false;
    if (st.next < st.session.end) {
      if (options_.line_delay.count() > 0) std::this_thread::sleep_for(options_.line_delay);
      std::string chunk = options_.lines[st.next++] + '\n';
      if (options_.keepalive_every && ++st.since_keepalive == options_.keepalive_every) {
        chunk += "\r\n";
        st.since_keepalive = 0;
      }
      return sink.write(chunk.data(), chunk.size());
    }
    if (!st.session.hold_open) {
      if (st.session.cut_mid_line && st.next < options_.lines.size()) {
        const auto& partial = options_.lines[st.next];
        sink.write(partial.data(), partial.size() / 2);
      }
      return false;  // drop the connection
    }
    std::this_thread::sleep_for(std::chrono::milliseconds{20});
    return sink.write("\r\n", 2);
  }

  Options options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> stream_connections_{0};
  std::atomic<std::size_t> search_requests_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> track_params_;
  std::vector<std::string> search_queries_;
};

}  // namespace eventpulse
