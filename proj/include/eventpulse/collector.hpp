#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <regex>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eventpulse/bounded_queue.hpp"
#include "eventpulse/clock.hpp"
#include "eventpulse/sources.hpp"
#include "eventpulse/track.hpp"
#include "eventpulse/tweet.hpp"

namespace eventpulse {

enum class CollectionMode { stream, search_recent, search_popular };

inline std::optional<CollectionMode> parse_mode(std::string_view s) {
  if (s == "stream") return CollectionMode::stream;
  if (s == "search-recent") return CollectionMode::search_recent;
  if (s == "search-popular") return CollectionMode::search_popular;
  return std::nullopt;
}

struct CollectionJob {
  CollectionMode mode = CollectionMode::stream;
  std::string event_name;
  std::vector<std::string> track_terms;
  std::filesystem::path archive_dir = "data";
  std::size_t max_pages = 180;  // search modes only

  /// Throws std::invalid_argument when the event name is not directory-safe or no terms given.
  void validate() const {
    static const std::regex kSafe("[A-Za-z0-9_-]+");
    if (!std::regex_match(event_name, kSafe))
      throw std::invalid_argument("event name must match [A-Za-z0-9_-]+: '" + event_name + "'");
    if (track_terms.empty()) throw std::invalid_argument("at least one track term is required");
  }
};

struct CollectionStats {
  std::uint64_t received = 0;
  std::uint64_t matched = 0;
  std::uint64_t written = 0;
  std::uint64_t malformed = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t reconnects = 0;
  std::uint64_t pages = 0;
  std::vector<Millis> backoff_delays;
  std::vector<Millis> rate_limit_waits;
  Timestamp started_at{};
  Timestamp ended_at{};
};

class ArchiveError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Appends raw lines to <archive_dir>/<event>/<YYYY-MM-DD>.jsonl keyed by UTC receipt date.
class ArchiveWriter {
 public:
  ArchiveWriter(const std::filesystem::path& archive_dir, const std::string& event_name)
      : dir_(archive_dir / event_name) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ArchiveError("cannot create archive directory " + dir_.string() + ": " + ec.message());
  }

  void append(std::string_view raw_line, Timestamp received_at) {
    auto date = format_utc_date(received_at);
    if (date != current_date_ || !out_.is_open()) {
      if (out_.is_open()) out_.close();
      current_path_ = dir_ / (date + ".jsonl");
      out_.open(current_path_, std::ios::binary | std::ios::app);
      if (!out_) throw ArchiveError("cannot open archive file " + current_path_.string());
      current_date_ = date;
    }
    out_.write(raw_line.data(), static_cast<std::streamsize>(raw_line.size()));
    out_.put('\n');
    if (!out_) throw ArchiveError("write failed on " + current_path_.string());
  }

  void flush() {
    if (out_.is_open()) {
      out_.flush();
      if (!out_) throw ArchiveError("flush failed on " + current_path_.string());
    }
  }

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path current_path_;
  std::string current_date_;
  std::ofstream out_;
};

struct CollectorOptions {
  Clock* clock = nullptr;  // defaults to the system clock
  std::size_t queue_capacity = 10'000;
  /// Called on the writer side after each received line is handled.
  std::function<void(const CollectionStats&)> progress;
};

namespace detail {

// Shared filtering for both modes: parse, track-match, per-run dedupe, raw append.
class RecordFilter {
 public:
  RecordFilter(const CollectionJob& job, ArchiveWriter& writer, CollectionStats& stats)
      : job_(job), writer_(writer), stats_(stats) {}

  void handle(std::string_view raw, Timestamp received_at) {
    ++stats_.received;
    auto tweet = try_parse_tweet(raw);
    if (!tweet) {
      ++stats_.malformed;
      return;
    }
    if (!matches_track(*tweet, job_.track_terms)) return;
    ++stats_.matched;
    if (!seen_.insert(tweet->id).second) {
      ++stats_.duplicates;
      return;
    }
    writer_.append(raw, received_at);
    ++stats_.written;
  }

 private:
  const CollectionJob& job_;
  ArchiveWriter& writer_;
  CollectionStats& stats_;
  std::unordered_set<TweetId> seen_;
};

inline Clock& clock_or_default(Clock* clock) {
  static SystemClock system_clock;
  return clock ? *clock : system_clock;
}

}  // namespace detail

/// Runs a streaming collection until `stop` fires or a finite source is exhausted.
/// A reader thread owns the connection (reconnecting with exponential backoff) and hands raw
/// lines to this thread through a bounded queue; this thread filters and appends.
inline CollectionStats collect_stream(const CollectionJob& job, StreamSource& source, std::stop_token stop,
                                      const CollectorOptions& options = {}) {
  if (job.mode != CollectionMode::stream) throw std::invalid_argument("collect_stream requires stream mode");
  job.validate();
  Clock& clock = detail::clock_or_default(options.clock);

  CollectionStats stats;
  stats.started_at = clock.now_seconds();
  ArchiveWriter writer(job.archive_dir, job.event_name);
  detail::RecordFilter filter(job, writer, stats);

  BoundedQueue<std::string> queue(options.queue_capacity);
  std::stop_source internal;
  std::stop_callback forward(stop, [&internal] { internal.request_stop(); });
  std::uint64_t reconnects = 0;
  std::vector<Millis> delays;

  std::jthread reader([&, token = internal.get_token()] {
    Backoff backoff;
    const LineSink sink = [&](std::string_view line) {
      if (is_blank(line)) return true;  // keep-alive
      return queue.push(std::string(line));
    };
    while (!token.stop_requested()) {
      auto connected_at = clock.now();
      auto end = source.run(job.track_terms, sink, token);
      if (end != StreamEnd::disconnected || token.stop_requested()) break;
      if (clock.now() - connected_at >= Backoff::kHealthyAfter) backoff.reset();
      auto delay = backoff.next();
      delays.push_back(delay);
      if (!clock.sleep_for(delay, token)) break;
      ++reconnects;
    }
    queue.close();
  });

  try {
    while (auto line = queue.pop()) {
      filter.handle(*line, clock.now_seconds());
      if (options.progress) options.progress(stats);
    }
  } catch (...) {
    internal.request_stop();
    queue.close();
    reader.join();
    throw;
  }
  reader.join();
  writer.flush();
  stats.reconnects = reconnects;
  stats.backoff_delays = std::move(delays);
  stats.ended_at = clock.now_seconds();
  return stats;
}

/// Pulls paged search results until the source runs dry or max_pages successful pages were
/// read. Rate-limited responses wait until the indicated reset time and retry the same page.
/// Failed requests retry with the stream backoff; more than `max_failures` consecutive
/// failures end the run.
inline CollectionStats collect_search(const CollectionJob& job, QuerySource& source,
                                      std::stop_token stop = {}, const CollectorOptions& options = {},
                                      unsigned max_failures = 8) {
  if (job.mode == CollectionMode::stream) throw std::invalid_argument("collect_search requires a search mode");
  job.validate();
  Clock& clock = detail::clock_or_default(options.clock);

  CollectionStats stats;
  stats.started_at = clock.now_seconds();
  ArchiveWriter writer(job.archive_dir, job.event_name);
  detail::RecordFilter filter(job, writer, stats);

  SearchRequest request{job.track_terms,
                        job.mode == CollectionMode::search_popular ? ResultType::popular : ResultType::recent,
                        std::nullopt};
  Backoff backoff;
  unsigned failures = 0;
  while (stats.pages < job.max_pages && !stop.stop_requested()) {
    auto page = source.fetch(request);
    if (page.status == SearchPage::Status::rate_limited) {
      auto now = clock.now();
      auto reset = page.reset_at ? std::chrono::time_point_cast<Millis>(*page.reset_at)
                                 : std::chrono::time_point_cast<Millis>(now) + Millis{15 * 60 * 1000};
      auto wait = std::max(Millis{0}, std::chrono::duration_cast<Millis>(reset - now));
      stats.rate_limit_waits.push_back(wait);
      if (!clock.sleep_for(wait, stop)) break;
      continue;
    }
    if (page.status == SearchPage::Status::failed) {
      if (++failures > max_failures) break;
      auto delay = backoff.next();
      stats.backoff_delays.push_back(delay);
      ++stats.reconnects;
      if (!clock.sleep_for(delay, stop)) break;
      continue;
    }
    failures = 0;
    backoff.reset();
    ++stats.pages;
    for (const auto& record : page.records) {
      if (is_blank(record)) continue;
      filter.handle(record, clock.now_seconds());
      if (options.progress) options.progress(stats);
    }
    if (!page.next_cursor || page.records.empty()) break;
    request.cursor = page.next_cursor;
  }
  writer.flush();
  stats.ended_at = clock.now_seconds();
  return stats;
}

}  // namespace eventpulse
