#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace bdsfix {

using UtcTime = std::chrono::sys_time<std::chrono::nanoseconds>;

// Accepts "YYYY-MM-DDTHH:MM:SS[.frac][Z]" (a space may replace the 'T').
UtcTime parse_utc(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ", with up to nine fractional digits when present.
std::string format_utc(UtcTime t);

double seconds_between(UtcTime from, UtcTime to);
UtcTime add_seconds(UtcTime t, double seconds);

/// Greenwich mean sidereal angle in radians, [0, 2pi). UTC stands in for UT1
/// (the difference is below a second, i.e. a few arc-seconds of rotation).
double greenwich_sidereal_angle(UtcTime t);

}  // namespace bdsfix
