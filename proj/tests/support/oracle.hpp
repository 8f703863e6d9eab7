#pragma once

// Brute-force reference computations used only by tests. Each one recomputes its answer from
// the raw tweet list by linear scans and a full sort, sharing no code with the library's
// counters, tie-break comparator, or bucketing arithmetic.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "eventpulse/tweet.hpp"

namespace eventpulse::oracle {

struct Bucket {
  std::int64_t start_epoch;
  std::uint64_t count;
  bool operator==(const Bucket&) const = default;
};

inline std::vector<Bucket> histogram(const std::vector<Tweet>& tweets, bool hourly, int tz_minutes) {
  using namespace std::chrono;
  if (tweets.empty()) return {};
  auto local_floor = [&](Timestamp t) -> sys_seconds {
    auto local = t + minutes{tz_minutes};
    return hourly ? sys_seconds{floor<hours>(local)} : sys_seconds{floor<days>(local)};
  };
  auto lo = local_floor(tweets.front().created_at), hi = lo;
  for (const auto& t : tweets) {
    lo = std::min(lo, local_floor(t.created_at));
    hi = std::max(hi, local_floor(t.created_at));
  }
  const seconds step = hourly ? seconds{3600} : seconds{86400};
  std::vector<sys_seconds> keyed;
  for (const auto& t : tweets) keyed.push_back(local_floor(t.created_at));
  std::vector<Bucket> out;
  for (auto b = lo; b <= hi; b += step) {
    auto n = static_cast<std::uint64_t>(std::count(keyed.begin(), keyed.end(), b));
    out.push_back({(b - minutes{tz_minutes}).time_since_epoch().count(), n});
  }
  return out;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct UserScore {
  std::string user;
  std::uint64_t score;
  bool operator==(const UserScore&) const = default;
};

inline std::vector<UserScore> sort_users(const std::map<std::string, std::uint64_t>& scores) {
  std::vector<UserScore> all;
  for (const auto& [u, s] : scores) all.push_back({u, s});
  std::sort(all.begin(), all.end(), [](const UserScore& a, const UserScore& b) {
    return std::make_tuple(~a.score, lower(a.user), a.user) < std::make_tuple(~b.score, lower(b.user), b.user);
  });
  return all;
}

inline std::vector<UserScore> top_active(const std::vector<Tweet>& tweets, std::size_t k) {
  std::map<std::string, std::uint64_t> scores;
  for (const auto& t : tweets) scores[t.author] += 1;
  auto all = sort_users(scores);
  all.resize(std::min(k, all.size()));
  return all;
}

inline std::vector<UserScore> top_received(const std::vector<Tweet>& tweets, std::size_t k) {
  std::map<std::string, std::uint64_t> scores;
  for (const auto& t : tweets)
    if (t.retweet_of) scores[t.retweet_of->author] += 1;
  auto all = sort_users(scores);
  all.resize(std::min(k, all.size()));
  return all;
}

struct TweetScore {
  TweetId id;
  std::uint64_t score;
  bool operator==(const TweetScore&) const = default;
};

inline std::vector<TweetScore> top_tweets(const std::vector<Tweet>& tweets, std::size_t k, bool embedded) {
  std::map<TweetId, std::uint64_t> score;
  for (const auto& t : tweets) {
    auto id = t.retweet_of ? t.retweet_of->tweet_id : t.id;
    auto& s = score[id];
    if (!embedded) {
      if (t.retweet_of) ++s;
      continue;
    }
    auto counter = t.retweet_of ? t.retweet_of->retweet_count : t.retweet_count;
    if (counter) s = std::max(s, *counter);
  }
  std::vector<TweetScore> all;
  for (const auto& [id, s] : score) all.push_back({id, s});
  std::sort(all.begin(), all.end(), [](const TweetScore& a, const TweetScore& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

struct Coord {
  TweetId id;
  double lat, lon;
  bool operator==(const Coord&) const = default;
};

inline std::vector<Coord> coordinates(const std::vector<Tweet>& tweets) {
  std::vector<Coord> out;
  for (const auto& t : tweets)
    if (t.coords) out.push_back({t.id, t.coords->latitude, t.coords->longitude});
  return out;
}

struct Edge {
  std::string source, target;
  int kind;  // 0 retweet, 1 reply
  TweetId tweet;
  bool operator==(const Edge&) const = default;
};

inline std::vector<Edge> interactions(const std::vector<Tweet>& tweets) {
  std::vector<Edge> out;
  for (const auto& t : tweets) {
    if (t.retweet_of) out.push_back({t.author, t.retweet_of->author, 0, t.id});
    if (t.reply_to) out.push_back({t.author, *t.reply_to, 1, t.id});
  }
  return out;
}

/// (source, target, kind or -1 when merged) -> weight, by sorting and counting runs.
inline std::vector<std::tuple<std::string, std::string, int, std::uint64_t>> aggregate(std::vector<Edge> edges,
                                                                                      bool merge) {
  std::vector<std::tuple<std::string, std::string, int>> keys;
  for (const auto& e : edges) keys.emplace_back(e.source, e.target, merge ? -1 : e.kind);
  std::sort(keys.begin(), keys.end());
  std::vector<std::tuple<std::string, std::string, int, std::uint64_t>> out;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.emplace_back(std::get<0>(keys[i]), std::get<1>(keys[i]), std::get<2>(keys[i]), j - i);
    i = j;
  }
  return out;
}

}  // namespace eventpulse::oracle
