#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace eventpulse {

using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline bool parse_uint(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

inline std::optional<Timestamp> make_timestamp(int y, int mon, int d, int hh, int mm, int ss,
                                               int offset_minutes) {
  using namespace std::chrono;
  if (mon < 1 || mon > 12 || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mon)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

// "+0000", "-0130", "+01:00", "Z"
inline std::optional<int> parse_offset(std::string_view s) {
  if (s == "Z" || s == "z") return 0;
  if (s.size() < 3 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  int sign = s[0] == '-' ? -1 : 1;
  s.remove_prefix(1);
  int hh = 0, mm = 0;
  if (s.size() == 4) {
    if (!parse_uint(s.substr(0, 2), hh) || !parse_uint(s.substr(2, 2), mm)) return std::nullopt;
  } else if (s.size() == 5 && s[2] == ':') {
    if (!parse_uint(s.substr(0, 2), hh) || !parse_uint(s.substr(3, 2), mm)) return std::nullopt;
  } else if (s.size() == 2) {
    if (!parse_uint(s, hh)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (hh > 14 || mm > 59) return std::nullopt;
  return sign * (hh * 60 + mm);
}

inline bool parse_clock(std::string_view s, int& hh, int& mm, int& ss) {
  return s.size() == 8 && s[2] == ':' && s[5] == ':' && parse_uint(s.substr(0, 2), hh) &&
         parse_uint(s.substr(3, 2), mm) && parse_uint(s.substr(6, 2), ss);
}

}  // namespace detail

/// Parses the platform's classic layout, e.g. "Thu Mar 19 18:00:00 +0000 2015".
inline std::optional<Timestamp> parse_platform_timestamp(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  std::array<std::string_view, 6> parts{};
  std::size_t n = 0;
  while (!s.empty()) {
    auto start = s.find_first_not_of(' ');
    if (start == std::string_view::npos) break;
    s.remove_prefix(start);
    auto end = s.find(' ');
    if (n == parts.size()) return std::nullopt;
    parts[n++] = s.substr(0, end);
    s.remove_prefix(end == std::string_view::npos ? s.size() : end);
  }
  if (n != 6) return std::nullopt;
  int mon = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i)
    if (parts[1] == kMonths[i]) mon = static_cast<int>(i) + 1;
  int day = 0, hh = 0, mm = 0, ss = 0, year = 0;
  if (mon == 0 || !detail::parse_uint(parts[2], day) || !detail::parse_clock(parts[3], hh, mm, ss) ||
      !detail::parse_uint(parts[5], year))
    return std::nullopt;
  auto off = detail::parse_offset(parts[4]);
  if (!off) return std::nullopt;
  return detail::make_timestamp(year, mon, day, hh, mm, ss, *off);
}

/// ISO-8601 date-time with optional fractional seconds and offset (absent offset means UTC).
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' '))
    return std::nullopt;
  int y = 0, mon = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (!detail::parse_uint(s.substr(0, 4), y) || !detail::parse_uint(s.substr(5, 2), mon) ||
      !detail::parse_uint(s.substr(8, 2), d) || !detail::parse_clock(s.substr(11, 8), hh, mm, ss))
    return std::nullopt;
  auto rest = s.substr(19);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) return std::nullopt;
    rest.remove_prefix(i);
  }
  int off = 0;
  if (!rest.empty()) {
    auto parsed = detail::parse_offset(rest);
    if (!parsed) return std::nullopt;
    off = *parsed;
  }
  return detail::make_timestamp(y, mon, d, hh, mm, ss, off);
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (auto t = parse_platform_timestamp(s)) return t;
  return parse_iso8601(s);
}

/// Formats as ISO-8601 in the zone `offset_minutes` east of UTC ("Z" suffix for UTC).
inline std::string format_iso8601(Timestamp t, int offset_minutes = 0) {
  using namespace std::chrono;
  auto local = t + minutes{offset_minutes};
  auto day_point = floor<days>(local);
  year_month_day ymd{day_point};
  hh_mm_ss hms{local - day_point};
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                        static_cast<int>(hms.seconds().count()));
  std::string out(buf, static_cast<std::size_t>(n));
  if (offset_minutes == 0) {
    out += 'Z';
  } else {
    int a = offset_minutes < 0 ? -offset_minutes : offset_minutes;
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_minutes < 0 ? '-' : '+', a / 60, a % 60);
    out += buf;
  }
  return out;
}

/// "YYYY-MM-DD" of the UTC calendar date.
inline std::string format_utc_date(Timestamp t) {
  using namespace std::chrono;
  year_month_day ymd{floor<days>(t)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace eventpulse
