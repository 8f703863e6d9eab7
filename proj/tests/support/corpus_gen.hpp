#pragma once

// Random corpora and record serialization for tests.

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "eventpulse/tweet.hpp"

namespace eventpulse::fixtures {

struct CorpusShape {
  std::size_t max_tweets = 10'000;
  std::size_t max_users = 400;
  double retweet_p = 0.4;
  double reply_p = 0.15;
  double coords_p = 0.1;
  std::int64_t span_seconds = 11 * 86400;
};

inline std::string random_user(std::mt19937_64& rng, std::size_t pool) {
  // Case-only variants ("ab"/"Ab") exercise the case-insensitive tie rule.
  static const char* stems[] = {"ab", "Ab", "idorrokia", "EuskalakariAEK", "korrika_aek", "zz", "a", "B", "b_"};
  auto i = std::uniform_int_distribution<std::size_t>(0, pool - 1)(rng);
  if (i < 9) return stems[i];
  return "user" + std::to_string(i);
}

/// Tweets with unique ids. Retweets point at earlier corpus tweets or at originals never seen.
inline std::vector<Tweet> random_corpus(std::mt19937_64& rng, const CorpusShape& shape = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto n = std::uniform_int_distribution<std::size_t>(0, shape.max_tweets)(rng);
  auto pool = std::uniform_int_distribution<std::size_t>(1, shape.max_users)(rng);
  const std::int64_t base = 1426788000;  // 2015-03-19T18:00:00Z
  std::vector<Tweet> out;
  out.reserve(n);
  std::vector<std::size_t> originals;
  TweetId next_id = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    Tweet t;
    t.id = next_id += std::uniform_int_distribution<TweetId>(1, 5)(rng);
    t.created_at = Timestamp{std::chrono::seconds{
        base + std::uniform_int_distribution<std::int64_t>(-7200, shape.span_seconds)(rng)}};
    t.author = random_user(rng, pool);
    t.text = "post " + std::to_string(i) + " #korrika";
    t.hashtags = {"korrika"};
    if (u(rng) < shape.retweet_p) {
      RetweetOrigin o;
      if (!originals.empty() && u(rng) < 0.7) {
        const auto& src = out[originals[std::uniform_int_distribution<std::size_t>(0, originals.size() - 1)(rng)]];
        o.tweet_id = src.id;
        o.author = src.author;
        o.text = src.text;
      } else {
        // Unseen original; a small id space forces repeated references.
        o.tweet_id = std::uniform_int_distribution<TweetId>(1, 300)(rng);
        o.author = random_user(rng, pool);
        o.text = "unseen " + std::to_string(o.tweet_id);
      }
      if (u(rng) < 0.8) o.retweet_count = std::uniform_int_distribution<std::uint64_t>(0, 2000)(rng);
      t.retweet_of = std::move(o);
    } else {
      originals.push_back(out.size());
      if (u(rng) < 0.5) t.retweet_count = std::uniform_int_distribution<std::uint64_t>(0, 2000)(rng);
    }
    if (u(rng) < shape.reply_p) t.reply_to = random_user(rng, pool);
    if (u(rng) < shape.coords_p)
      t.coords = GeoPoint{std::uniform_real_distribution<double>(-90, 90)(rng),
                          std::uniform_real_distribution<double>(-180, 180)(rng)};
    out.push_back(std::move(t));
  }
  return out;
}

inline std::string platform_time(Timestamp t) {
  using namespace std::chrono;
  static const char* wd[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static const char* mo[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  weekday w{dp};
  hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %s %02u %02d:%02d:%02d +0000 %d", wd[w.c_encoding()],
                mo[static_cast<unsigned>(ymd.month()) - 1], static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()), static_cast<int>(ymd.year()));
  return buf;
}

/// A platform-style record for `t` (GeoJSON coordinates when `geojson`, legacy geo otherwise).
inline std::string to_record(const Tweet& t, bool geojson = true) {
  nlohmann::json j;
  j["id"] = t.id;
  j["id_str"] = std::to_string(t.id);
  j["created_at"] = platform_time(t.created_at);
  j["user"] = {{"screen_name", t.author}};
  j["text"] = t.text;
  auto tags = nlohmann::json::array();
  for (const auto& h : t.hashtags) tags.push_back({{"text", h}});
  j["entities"] = {{"hashtags", tags}};
  if (t.retweet_count) j["retweet_count"] = *t.retweet_count;
  if (t.retweet_of) {
    nlohmann::json o;
    o["id"] = t.retweet_of->tweet_id;
    o["user"] = {{"screen_name", t.retweet_of->author}};
    o["text"] = t.retweet_of->text;
    if (t.retweet_of->retweet_count) o["retweet_count"] = *t.retweet_of->retweet_count;
    j["retweeted_status"] = o;
  }
  j["in_reply_to_screen_name"] = t.reply_to ? nlohmann::json(*t.reply_to) : nlohmann::json(nullptr);
  if (t.coords) {
    if (geojson) {
      j["coordinates"] = {{"type", "Point"}, {"coordinates", {t.coords->longitude, t.coords->latitude}}};
    } else {
      j["geo"] = {{"type", "Point"}, {"coordinates", {t.coords->latitude, t.coords->longitude}}};
    }
  } else {
    j["coordinates"] = nullptr;
  }
  return j.dump();
}

}  // namespace eventpulse::fixtures
