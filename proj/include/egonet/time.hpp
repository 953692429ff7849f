#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egonet {

// Durations are whole seconds. One year is a Julian year (365.25 days).
using Seconds = std::int64_t;

inline constexpr Seconds kSecondsPerDay = 86'400;
inline constexpr Seconds kSecondsPerYear = 31'557'600;           // 365.25 d
inline constexpr Seconds kSecondsPerMonth = kSecondsPerYear / 12;  // 30.4375 d
inline constexpr Seconds kHalfYear = kSecondsPerYear / 2;          // 182.625 d

// UTC instant at second resolution.
struct Instant {
  Seconds epoch_seconds = 0;

  constexpr auto operator<=>(const Instant&) const = default;

  constexpr Instant operator+(Seconds d) const { return {epoch_seconds + d}; }
  constexpr Instant operator-(Seconds d) const { return {epoch_seconds - d}; }
  constexpr Seconds operator-(Instant other) const { return epoch_seconds - other.epoch_seconds; }
};

inline constexpr double to_years(Seconds d) {
  return static_cast<double>(d) / static_cast<double>(kSecondsPerYear);
}

inline constexpr double to_days(Seconds d) {
  return static_cast<double>(d) / static_cast<double>(kSecondsPerDay);
}

struct TimeParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline int parse_fixed(std::string_view s, std::size_t pos, std::size_t len, std::string_view text) {
  if (pos + len > s.size()) throw TimeParseError("truncated timestamp: '" + std::string(text) + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') throw TimeParseError("bad digit in timestamp: '" + std::string(text) + "'");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

inline void expect_char(std::string_view s, std::size_t pos, char c, std::string_view text) {
  if (pos >= s.size() || s[pos] != c) {
    throw TimeParseError("expected '" + std::string(1, c) + "' in timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace detail

// Parses an RFC 3339 date-time ("2020-01-31T12:00:00Z", "...+02:00",
// fractional seconds allowed and floored). Anything else throws.
inline Instant parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const std::string_view s = text;
  const int yr = detail::parse_fixed(s, 0, 4, text);
  detail::expect_char(s, 4, '-', text);
  const int mo = detail::parse_fixed(s, 5, 2, text);
  detail::expect_char(s, 7, '-', text);
  const int dy = detail::parse_fixed(s, 8, 2, text);
  if (s.size() <= 10 || (s[10] != 'T' && s[10] != 't')) {
    throw TimeParseError("expected 'T' in timestamp: '" + std::string(text) + "'");
  }
  const int hh = detail::parse_fixed(s, 11, 2, text);
  detail::expect_char(s, 13, ':', text);
  const int mi = detail::parse_fixed(s, 14, 2, text);
  detail::expect_char(s, 16, ':', text);
  const int ss = detail::parse_fixed(s, 17, 2, text);
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) throw TimeParseError("empty fraction in timestamp: '" + std::string(text) + "'");
  }
  if (pos >= s.size()) throw TimeParseError("missing offset in timestamp: '" + std::string(text) + "'");
  Seconds offset = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    const int oh = detail::parse_fixed(s, pos + 1, 2, text);
    detail::expect_char(s, pos + 3, ':', text);
    const int om = detail::parse_fixed(s, pos + 4, 2, text);
    if (oh > 23 || om > 59) throw TimeParseError("bad offset in timestamp: '" + std::string(text) + "'");
    offset = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw TimeParseError("bad offset in timestamp: '" + std::string(text) + "'");
  }
  if (pos != s.size()) throw TimeParseError("trailing characters in timestamp: '" + std::string(text) + "'");

  const year_month_day ymd{year{yr}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(dy)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) {
    throw TimeParseError("out-of-range field in timestamp: '" + std::string(text) + "'");
  }
  const Seconds days = sys_days{ymd}.time_since_epoch().count();
  return Instant{days * kSecondsPerDay + hh * 3600 + mi * 60 + ss - offset};
}

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_rfc3339(Instant t) {
  using namespace std::chrono;
  Seconds days = t.epoch_seconds / kSecondsPerDay;
  Seconds rem = t.epoch_seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  return buf;
}

}  // namespace egonet
