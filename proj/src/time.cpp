#include "bdsfix/time.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bdsfix/error.hpp"

namespace bdsfix {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw ParseError("timestamp too short: '" + std::string(text) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      throw ParseError("expected digit in timestamp '" + std::string(text) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw ParseError("malformed timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

UtcTime parse_utc(std::string_view text) {
  using namespace std::chrono;
  expect_char(text, 4, "-");
  expect_char(text, 7, "-");
  expect_char(text, 10, "T ");
  expect_char(text, 13, ":");
  expect_char(text, 16, ":");
  const int y = parse_digits(text, 0, 4);
  const int mo = parse_digits(text, 5, 2);
  const int d = parse_digits(text, 8, 2);
  const int h = parse_digits(text, 11, 2);
  const int mi = parse_digits(text, 14, 2);
  const int s = parse_digits(text, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw ParseError("timestamp out of range: '" + std::string(text) + "'");
  }

  std::size_t pos = 19;
  std::int64_t frac_ns = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::int64_t scale = 100000000;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      frac_ns += scale * (text[pos] - '0');
      scale /= 10;
      ++pos;
    }
    if (pos == start) {
      throw ParseError("empty fractional seconds in '" + std::string(text) + "'");
    }
  }
  if (pos < text.size() && text[pos] == 'Z') {
    ++pos;
  }
  if (pos != text.size()) {
    throw ParseError("trailing characters in timestamp '" + std::string(text) + "'");
  }

  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + nanoseconds{frac_ns};
}

std::string format_utc(UtcTime t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};

  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  std::string out = buf;
  auto ns = hms.subseconds().count();
  if (ns != 0) {
    char frac[16];
    std::snprintf(frac, sizeof frac, ".%09lld", static_cast<long long>(ns));
    std::string f = frac;
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  out += 'Z';
  return out;
}

double seconds_between(UtcTime from, UtcTime to) {
  return std::chrono::duration<double>(to - from).count();
}

UtcTime add_seconds(UtcTime t, double seconds) {
  return t + std::chrono::duration_cast<std::chrono::nanoseconds>(
                 std::chrono::duration<double>(seconds));
}

double greenwich_sidereal_angle(UtcTime t) {
  using namespace std::chrono;
  // J2000.0 = 2000-01-01T12:00:00
  const UtcTime j2000 = sys_days{year{2000} / January / 1} + hours{12};
  const double d = seconds_between(j2000, t) / 86400.0;
  const double deg = std::fmod(280.46061837 + 360.98564736629 * d, 360.0);
  const double rad = deg * std::numbers::pi / 180.0;
  return rad < 0.0 ? rad + 2.0 * std::numbers::pi : rad;
}

}  // namespace bdsfix
