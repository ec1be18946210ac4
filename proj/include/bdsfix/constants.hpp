#pragma once

#include <numbers>

namespace bdsfix::constants {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kEarthGm = 3.986004418e14;          // m^3/s^2
inline constexpr double kEarthRotationRate = 7.2921150e-5;  // rad/s

// CGCS2000 ellipsoid.
inline constexpr double kEllipsoidA = 6378137.0;
inline constexpr double kEllipsoidF = 1.0 / 298.257222101;
inline constexpr double kEllipsoidB = kEllipsoidA * (1.0 - kEllipsoidF);
inline constexpr double kEllipsoidE2 = kEllipsoidF * (2.0 - kEllipsoidF);

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

inline constexpr double kSecondsPerDay = 86400.0;

}  // namespace bdsfix::constants
