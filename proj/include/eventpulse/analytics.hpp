#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eventpulse/time.hpp"
#include "eventpulse/tweet.hpp"

namespace eventpulse {

// ---------------------------------------------------------------------------------------------
// Ranking

template <class Key>
struct RankedEntry {
  Key key{};
  std::uint64_t score = 0;
  std::size_t rank = 0;  // 1-based

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Ranking order: descending score, then ascending key. Screen names compare
/// case-insensitively with raw bytes as the final tie-break, ids numerically.
struct RankOrder {
  static int compare_keys(std::uint64_t a, std::uint64_t b) { return a < b ? -1 : (a > b ? 1 : 0); }

  static int compare_keys(std::string_view a, std::string_view b) {
    auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto ca = static_cast<unsigned char>(a[i]);
      auto cb = static_cast<unsigned char>(b[i]);
      if (ca >= 'A' && ca <= 'Z') ca = static_cast<unsigned char>(ca - 'A' + 'a');
      if (cb >= 'A' && cb <= 'Z') cb = static_cast<unsigned char>(cb - 'A' + 'a');
      if (ca != cb) return ca < cb ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return a < b ? -1 : (a > b ? 1 : 0);
  }

  template <class Key>
  bool operator()(const std::pair<Key, std::uint64_t>& a, const std::pair<Key, std::uint64_t>& b) const {
    if (a.second != b.second) return a.second > b.second;
    return compare_keys(a.first, b.first) < 0;
  }
};

/// The first k entries of `scores` in rank order.
template <class Key, class Map>
std::vector<RankedEntry<Key>> rank_top_k(const Map& scores, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<std::pair<Key, std::uint64_t>> items(scores.begin(), scores.end());
  auto n = std::min(k, items.size());
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n), items.end(), RankOrder{});
  std::vector<RankedEntry<Key>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({std::move(items[i].first), items[i].second, i + 1});
  return out;
}

/// Per-user tweet counts. Counters built over disjoint partitions merge by addition.
class ActivityCounter {
 public:
  void add(const Tweet& t) { ++counts_[t.author]; }
  void add(std::span<const Tweet> tweets) {
    for (const auto& t : tweets) add(t);
  }
  void merge(const ActivityCounter& other) {
    for (const auto& [user, n] : other.counts_) counts_[user] += n;
  }
  const std::unordered_map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::vector<RankedEntry<std::string>> top(std::size_t k) const { return rank_top_k<std::string>(counts_, k); }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

/// Per-user count of corpus tweets retweeting that user's content.
class ReceivedRetweetCounter {
 public:
  void add(const Tweet& t) {
    if (t.retweet_of) ++counts_[t.retweet_of->author];
  }
  void add(std::span<const Tweet> tweets) {
    for (const auto& t : tweets) add(t);
  }
  void merge(const ReceivedRetweetCounter& other) {
    for (const auto& [user, n] : other.counts_) counts_[user] += n;
  }
  const std::unordered_map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::vector<RankedEntry<std::string>> top(std::size_t k) const { return rank_top_k<std::string>(counts_, k); }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

inline std::vector<RankedEntry<std::string>> top_users_by_activity(std::span<const Tweet> tweets, std::size_t k) {
  ActivityCounter c;
  c.add(tweets);
  return c.top(k);
}

inline std::vector<RankedEntry<std::string>> top_users_by_received_retweets(std::span<const Tweet> tweets,
                                                                           std::size_t k) {
  ReceivedRetweetCounter c;
  c.add(tweets);
  return c.top(k);
}

/// Where retweet scores come from.
enum class CountSource {
  observed,  // retweets present in the corpus
  embedded,  // the largest cumulative retweet counter carried by any copy of the original
};

struct TopTweet {
  RankedEntry<TweetId> entry;
  std::string author;
  std::string text;
};

/// Tallies originals: every observed non-retweet plus every original referenced by a retweet.
class RetweetTally {
 public:
  void add(const Tweet& t) {
    if (t.retweet_of) {
      const auto& o = *t.retweet_of;
      auto& e = originals_[o.tweet_id];
      ++e.observed;
      if (o.retweet_count) e.embedded = std::max(e.embedded, *o.retweet_count);
      offer_display(e, false, o.author, o.text);
    } else {
      auto& e = originals_[t.id];
      if (t.retweet_count) e.embedded = std::max(e.embedded, *t.retweet_count);
      offer_display(e, true, t.author, t.text);
    }
  }
  void add(std::span<const Tweet> tweets) {
    for (const auto& t : tweets) add(t);
  }

  void merge(const RetweetTally& other) {
    for (const auto& [id, o] : other.originals_) {
      auto& e = originals_[id];
      e.observed += o.observed;
      e.embedded = std::max(e.embedded, o.embedded);
      if (o.has_display) offer_display(e, o.direct, o.author, o.text);
    }
  }

  std::vector<TopTweet> top(std::size_t k, CountSource source = CountSource::observed) const {
    std::unordered_map<TweetId, std::uint64_t> scores;
    scores.reserve(originals_.size());
    for (const auto& [id, e] : originals_)
      scores.emplace(id, source == CountSource::observed ? e.observed : e.embedded);
    std::vector<TopTweet> out;
    for (auto& entry : rank_top_k<TweetId>(scores, k)) {
      const auto& e = originals_.at(entry.key);
      out.push_back({entry, e.author, e.text});
    }
    return out;
  }

  std::size_t size() const { return originals_.size(); }

 private:
  struct Original {
    std::uint64_t observed = 0;
    std::uint64_t embedded = 0;
    bool has_display = false;
    bool direct = false;
    std::string author;
    std::string text;
  };

  // The directly observed record wins; otherwise the smallest (author, text) among copies,
  // so the result does not depend on input order.
  static void offer_display(Original& e, bool direct, const std::string& author, const std::string& text) {
    bool take = !e.has_display || (direct && !e.direct) ||
                (direct == e.direct && std::tie(author, text) < std::tie(e.author, e.text));
    if (!take) return;
    e.has_display = true;
    e.direct = direct;
    e.author = author;
    e.text = text;
  }

  std::unordered_map<TweetId, Original> originals_;
};

inline std::vector<TopTweet> top_tweets_by_retweets(std::span<const Tweet> tweets, std::size_t k,
                                                    CountSource source = CountSource::observed) {
  RetweetTally tally;
  tally.add(tweets);
  return tally.top(k, source);
}

// ---------------------------------------------------------------------------------------------
// Histogram

enum class Granularity { hour, day };

inline std::optional<Granularity> parse_granularity(std::string_view s) {
  if (s == "hour" || s == "h") return Granularity::hour;
  if (s == "day" || s == "d") return Granularity::day;
  return std::nullopt;
}

struct HistogramBucket {
  Timestamp bucket_start{};  // UTC instant at which the local bucket begins
  std::uint64_t count = 0;

  friend bool operator==(const HistogramBucket&, const HistogramBucket&) = default;
};

constexpr int kMaxTzOffsetMinutes = 840;

/// Bucket counts keyed by local bucket index. Mergeable across partitions.
class HistogramCounter {
 public:
  HistogramCounter(Granularity g, int tz_offset_minutes) : granularity_(g), tz_(tz_offset_minutes) {
    if (tz_ < -kMaxTzOffsetMinutes || tz_ > kMaxTzOffsetMinutes)
      throw std::invalid_argument("tz offset must lie within [-840, 840] minutes");
  }

  void add(const Tweet& t) { ++counts_[bucket_of(t.created_at)]; }
  void add(std::span<const Tweet> tweets) {
    for (const auto& t : tweets) add(t);
  }
  void merge(const HistogramCounter& other) {
    if (other.granularity_ != granularity_ || other.tz_ != tz_)
      throw std::invalid_argument("cannot merge histograms with different bucketing");
    for (const auto& [b, n] : other.counts_) counts_[b] += n;
  }

  /// Ascending buckets from the first to the last non-empty one, gaps filled with zeros.
  std::vector<HistogramBucket> buckets() const {
    std::vector<HistogramBucket> out;
    if (counts_.empty()) return out;
    auto first = counts_.begin()->first;
    auto last = counts_.rbegin()->first;
    out.reserve(static_cast<std::size_t>(last - first + 1));
    auto it = counts_.begin();
    for (auto b = first; b <= last; ++b) {
      std::uint64_t n = 0;
      if (it != counts_.end() && it->first == b) n = (it++)->second;
      out.push_back({start_of(b), n});
    }
    return out;
  }

 private:
  std::int64_t width() const { return granularity_ == Granularity::hour ? 3600 : 86400; }

  std::int64_t bucket_of(Timestamp t) const {
    auto local = t.time_since_epoch().count() + std::int64_t{tz_} * 60;
    auto w = width();
    return local >= 0 ? local / w : -((-local + w - 1) / w);
  }

  Timestamp start_of(std::int64_t bucket) const {
    return Timestamp{std::chrono::seconds{bucket * width() - std::int64_t{tz_} * 60}};
  }

  Granularity granularity_;
  int tz_;
  std::map<std::int64_t, std::uint64_t> counts_;
};

inline std::vector<HistogramBucket> histogram(std::span<const Tweet> tweets, Granularity granularity,
                                              int tz_offset_minutes = 0) {
  HistogramCounter c(granularity, tz_offset_minutes);
  c.add(tweets);
  return c.buckets();
}

// ---------------------------------------------------------------------------------------------
// Coordinates

struct CoordinateRow {
  TweetId id = 0;
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const CoordinateRow&, const CoordinateRow&) = default;
};

inline std::vector<CoordinateRow> extract_coordinates(std::span<const Tweet> tweets) {
  std::vector<CoordinateRow> rows;
  for (const auto& t : tweets)
    if (t.coords) rows.push_back({t.id, t.coords->latitude, t.coords->longitude});
  return rows;
}

// ---------------------------------------------------------------------------------------------
// Corpus summary

struct CorpusSummary {
  std::uint64_t tweets = 0;
  std::uint64_t retweets = 0;
  std::uint64_t replies = 0;
  std::uint64_t geotagged = 0;
  std::uint64_t distinct_users = 0;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
};

inline CorpusSummary summarize(std::span<const Tweet> tweets) {
  CorpusSummary s;
  std::unordered_set<std::string_view> users;
  for (const auto& t : tweets) {
    ++s.tweets;
    s.retweets += t.retweet_of.has_value();
    s.replies += t.reply_to.has_value();
    s.geotagged += t.coords.has_value();
    users.insert(t.author);
    if (!s.first || t.created_at < *s.first) s.first = t.created_at;
    if (!s.last || t.created_at > *s.last) s.last = t.created_at;
  }
  s.distinct_users = users.size();
  return s;
}

// ---------------------------------------------------------------------------------------------
// Output formats

inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// One "<ISO-8601 start><TAB><count>" line per bucket.
inline void write_histogram_dat(std::ostream& out, std::span<const HistogramBucket> buckets, int tz_offset_minutes) {
  for (const auto& b : buckets) out << format_iso8601(b.bucket_start, tz_offset_minutes) << '\t' << b.count << '\n';
}

inline void write_coordinates_csv(std::ostream& out, std::span<const CoordinateRow> rows) {
  out << "id,latitude,longitude\n";
  for (const auto& r : rows) out << r.id << ',' << format_double(r.latitude) << ',' << format_double(r.longitude) << '\n';
}

}  // namespace eventpulse
