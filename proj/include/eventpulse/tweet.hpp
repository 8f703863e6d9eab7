#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eventpulse/time.hpp"

namespace eventpulse {

using TweetId = std::uint64_t;

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// The embedded original of a retweet.
struct RetweetOrigin {
  TweetId tweet_id = 0;
  std::string author;
  std::string text;
  // Cumulative counter carried by the embedded copy at capture time.
  std::optional<std::uint64_t> retweet_count;

  friend bool operator==(const RetweetOrigin&, const RetweetOrigin&) = default;
};

struct Tweet {
  TweetId id = 0;
  Timestamp created_at{};
  std::string author;
  std::string text;
  std::vector<std::string> hashtags;
  std::optional<RetweetOrigin> retweet_of;
  std::optional<std::string> reply_to;
  std::optional<GeoPoint> coords;
  std::optional<std::uint64_t> retweet_count;

  bool is_retweet() const { return retweet_of.has_value(); }

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

struct ParseStats {
  std::uint64_t total_lines = 0;
  std::uint64_t parsed = 0;
  std::uint64_t skipped_malformed = 0;
  std::uint64_t duplicates_dropped = 0;

  friend bool operator==(const ParseStats&, const ParseStats&) = default;
};

/// Thrown by parse_tweet. field() names the offending record key ("json" for syntax errors).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ArchiveIoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline std::optional<TweetId> json_id(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<TweetId>();
  if (v.is_number_integer()) {
    auto i = v.get<std::int64_t>();
    return i > 0 ? std::optional<TweetId>(static_cast<TweetId>(i)) : std::nullopt;
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    TweetId id = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec == std::errc{} && p == s.data() + s.size()) return id;
  }
  return std::nullopt;
}

inline const nlohmann::json* member(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::optional<std::uint64_t> json_count(const nlohmann::json& obj, const char* key) {
  auto* v = member(obj, key);
  if (v && v->is_number_integer() && v->get<std::int64_t>() >= 0) return v->get<std::uint64_t>();
  return std::nullopt;
}

inline std::string screen_name(const nlohmann::json& obj, const char* context) {
  auto* user = member(obj, "user");
  auto* name = user ? member(*user, "screen_name") : nullptr;
  if (!name || !name->is_string()) throw ParseError(std::string(context) + "user.screen_name", "missing");
  std::string_view s = name->get_ref<const std::string&>();
  if (!s.empty() && s.front() == '@') s.remove_prefix(1);
  if (s.empty()) throw ParseError(std::string(context) + "user.screen_name", "empty");
  return std::string(s);
}

inline std::optional<std::pair<double, double>> number_pair(const nlohmann::json* v) {
  if (!v || !v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
    return std::nullopt;
  return std::pair{(*v)[0].get<double>(), (*v)[1].get<double>()};
}

inline bool valid_point(double lat, double lon) {
  return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

// GeoJSON "coordinates.coordinates" is [lon, lat]; legacy "geo.coordinates" is [lat, lon].
// Out-of-range pairs are treated as absent.
inline std::optional<GeoPoint> resolve_coords(const nlohmann::json& record) {
  if (auto* c = member(record, "coordinates")) {
    if (auto p = number_pair(member(*c, "coordinates")); p && valid_point(p->second, p->first))
      return GeoPoint{p->second, p->first};
  }
  if (auto* g = member(record, "geo")) {
    if (auto p = number_pair(member(*g, "coordinates")); p && valid_point(p->first, p->second))
      return GeoPoint{p->first, p->second};
  }
  return std::nullopt;
}

}  // namespace detail

/// Hashtags of `text` by the pattern "#" followed by letters, digits or underscore, lowercased.
inline std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() &&
           (detail::is_word_byte(static_cast<unsigned char>(text[j])) || text[j] == '_'))
      ++j;
    if (j > i + 1) tags.push_back(detail::ascii_lower(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  return tags;
}

/// Parses one archive record. Throws ParseError naming the offending field.
inline Tweet parse_tweet(std::string_view line) {
  using nlohmann::json;
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded()) throw ParseError("json", "malformed record");
  if (!record.is_object()) throw ParseError("json", "record is not an object");

  Tweet t;
  auto* id = detail::member(record, "id");
  auto parsed_id = id ? detail::json_id(*id) : std::nullopt;
  if (!parsed_id || *parsed_id == 0) throw ParseError("id", "missing or invalid");
  t.id = *parsed_id;

  auto* created = detail::member(record, "created_at");
  if (!created || !created->is_string()) throw ParseError("created_at", "missing");
  auto ts = parse_timestamp(created->get_ref<const std::string&>());
  if (!ts) throw ParseError("created_at", "unparseable timestamp");
  t.created_at = *ts;

  t.author = detail::screen_name(record, "");

  if (auto* text = detail::member(record, "text"); text && text->is_string())
    t.text = text->get<std::string>();

  auto* entities = detail::member(record, "entities");
  auto* tags = entities ? detail::member(*entities, "hashtags") : nullptr;
  if (tags && tags->is_array()) {
    for (const auto& tag : *tags)
      if (auto* tx = detail::member(tag, "text"); tx && tx->is_string())
        t.hashtags.push_back(detail::ascii_lower(tx->get_ref<const std::string&>()));
  } else {
    t.hashtags = extract_hashtags(t.text);
  }

  if (auto* rt = detail::member(record, "retweeted_status")) {
    if (!rt->is_object()) throw ParseError("retweeted_status", "not an object");
    auto* rid = detail::member(*rt, "id");
    auto orig_id = rid ? detail::json_id(*rid) : std::nullopt;
    if (!orig_id || *orig_id == 0) throw ParseError("retweeted_status.id", "missing or invalid");
    if (*orig_id == t.id) throw ParseError("retweeted_status.id", "equals the retweet's own id");
    RetweetOrigin origin;
    origin.tweet_id = *orig_id;
    origin.author = detail::screen_name(*rt, "retweeted_status.");
    if (auto* text = detail::member(*rt, "text"); text && text->is_string())
      origin.text = text->get<std::string>();
    origin.retweet_count = detail::json_count(*rt, "retweet_count");
    t.retweet_of = std::move(origin);
  }

  if (auto* reply = detail::member(record, "in_reply_to_screen_name");
      reply && reply->is_string() && !reply->get_ref<const std::string&>().empty())
    t.reply_to = reply->get<std::string>();

  t.coords = detail::resolve_coords(record);
  t.retweet_count = detail::json_count(record, "retweet_count");
  return t;
}

inline std::optional<Tweet> try_parse_tweet(std::string_view line) noexcept {
  try {
    return parse_tweet(line);
  } catch (...) {
    return std::nullopt;
  }
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

/// Streams the records of an archive in file order. Whitespace-only lines are not records
/// and are not counted. Returns the parse statistics.
inline ParseStats for_each_tweet(const std::filesystem::path& path, bool dedupe,
                                 const std::function<void(Tweet&&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveIoError("cannot read archive " + path.string());
  ParseStats stats;
  std::unordered_set<TweetId> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    ++stats.total_lines;
    auto tweet = try_parse_tweet(line);
    if (!tweet) {
      ++stats.skipped_malformed;
      continue;
    }
    if (dedupe && !seen.insert(tweet->id).second) {
      ++stats.duplicates_dropped;
      continue;
    }
    ++stats.parsed;
    sink(std::move(*tweet));
  }
  if (in.bad()) throw ArchiveIoError("read error on " + path.string());
  return stats;
}

struct Corpus {
  std::vector<Tweet> tweets;
  ParseStats stats;
};

inline Corpus read_archive(const std::filesystem::path& path, bool dedupe) {
  Corpus c;
  c.stats = for_each_tweet(path, dedupe, [&](Tweet&& t) { c.tweets.push_back(std::move(t)); });
  return c;
}

}  // namespace eventpulse
