#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace mdprof {

/// A UTC instant at one-second resolution. `has_time` distinguishes a bare
/// calendar date (serialized as xsd:date) from a date-time.
struct Timestamp {
  std::int64_t seconds = 0;
  bool has_time = false;

  auto operator<=>(const Timestamp&) const = default;

  int year() const {
    using namespace std::chrono;
    auto day = floor<days>(sys_seconds{std::chrono::seconds{seconds}});
    return static_cast<int>(year_month_day{day}.year());
  }
};

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

inline std::optional<std::int64_t> civil_seconds(int y, int m, int d, int hh, int mm, int ss) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  auto t = sys_days{ymd}.time_since_epoch() + hours{hh} + minutes{mm} + std::chrono::seconds{ss};
  return duration_cast<std::chrono::seconds>(t).count();
}

// Parses "HH:MM[:SS[.fff]]" starting at pos.
inline bool read_clock(std::string_view s, std::size_t& pos, int& hh, int& mm, int& ss) {
  ss = 0;
  if (!read_digits(s, pos, 2, hh)) return false;
  if (pos >= s.size() || s[pos] != ':') return false;
  ++pos;
  if (!read_digits(s, pos, 2, mm)) return false;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_digits(s, pos, 2, ss)) return false;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Accepts ISO-8601 dates and date-times (with optional `Z` or numeric
/// offset) and slash dates, `DD/MM/YYYY` when day_first else `MM/DD/YYYY`,
/// optionally followed by a space and a clock time.
inline std::optional<Timestamp> parse_timestamp(std::string_view s, bool day_first = true) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  std::size_t pos = 0;
  int y = 0, m = 0, d = 0, hh = 0, mm = 0, ss = 0;
  bool has_time = false;
  std::int64_t offset = 0;

  if (s.size() >= 10 && s[4] == '-') {
    if (!detail::read_digits(s, pos, 4, y) || s[pos++] != '-' ||
        !detail::read_digits(s, pos, 2, m) || pos >= s.size() || s[pos++] != '-' ||
        !detail::read_digits(s, pos, 2, d))
      return std::nullopt;
    if (pos < s.size()) {
      if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
      ++pos;
      if (!detail::read_clock(s, pos, hh, mm, ss)) return std::nullopt;
      has_time = true;
      if (pos < s.size()) {
        if (s[pos] == 'Z') {
          ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
          const int sign = s[pos] == '+' ? 1 : -1;
          ++pos;
          int oh = 0, om = 0;
          if (!detail::read_digits(s, pos, 2, oh)) return std::nullopt;
          if (pos < s.size() && s[pos] == ':') ++pos;
          if (!detail::read_digits(s, pos, 2, om) || oh > 23 || om > 59) return std::nullopt;
          offset = sign * (oh * 3600 + om * 60);
        }
      }
    }
  } else if (s.size() >= 10 && s[2] == '/' && s[5] == '/') {
    int a = 0, b = 0;
    if (!detail::read_digits(s, pos, 2, a) || s[pos++] != '/' ||
        !detail::read_digits(s, pos, 2, b) || s[pos++] != '/' ||
        !detail::read_digits(s, pos, 4, y))
      return std::nullopt;
    d = day_first ? a : b;
    m = day_first ? b : a;
    if (pos < s.size()) {
      if (s[pos] != ' ') return std::nullopt;
      ++pos;
      if (!detail::read_clock(s, pos, hh, mm, ss)) return std::nullopt;
      has_time = true;
    }
  } else {
    return std::nullopt;
  }
  if (pos != s.size() || y < 1 || m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  auto secs = detail::civil_seconds(y, m, d, hh, mm, ss);
  if (!secs) return std::nullopt;
  return Timestamp{*secs - offset, has_time};
}

/// `YYYY-MM-DD` for dates, `YYYY-MM-DDTHH:MM:SSZ` for date-times.
inline std::string format_timestamp(const Timestamp& t) {
  using namespace std::chrono;
  sys_seconds tp{std::chrono::seconds{t.seconds}};
  auto day = floor<days>(tp);
  year_month_day ymd{day};
  hh_mm_ss clock{tp - day};
  char buf[32];
  if (!t.has_time) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(clock.hours().count()),
                  static_cast<int>(clock.minutes().count()),
                  static_cast<int>(clock.seconds().count()));
  }
  return buf;
}

}  // namespace mdprof
